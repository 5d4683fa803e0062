#include "catalog.hpp"

namespace mz::mql::detail {

namespace {

template <typename T>
const T& as(const Record& r) {
    return std::get<T>(r);
}

Value str(std::string_view s) { return Value{std::string(s)}; }
Value num(double d) { return Value{d}; }

void opt_str(Values& out, const std::optional<std::string>& v) {
    if (v) {
        out.emplace_back(str(*v));
    } else {
        out.emplace_back(std::nullopt);
    }
}

void add(std::vector<CatalogField>& table, Scope scope, std::string path, ValueKind type, bool multi,
         Extractor fn) {
    table.push_back(CatalogField{FieldInfo{std::move(path), scope, type, multi}, std::move(fn)});
}

void add_io(std::vector<CatalogField>& table, const char* prefix,
            std::vector<IOSpec> ModelRecord::*member) {
    std::string p = prefix;
    add(table, Scope::Model, p + ".name", ValueKind::String, true,
        [member](const Record& r, const StoreView&, Values& out) {
            for (const auto& s : as<ModelRecord>(r).*member) out.emplace_back(str(s.name));
        });
    add(table, Scope::Model, p + ".dtype", ValueKind::String, true,
        [member](const Record& r, const StoreView&, Values& out) {
            for (const auto& s : as<ModelRecord>(r).*member) out.emplace_back(str(to_string(s.dtype)));
        });
    add(table, Scope::Model, p + ".semantic_type", ValueKind::String, true,
        [member](const Record& r, const StoreView&, Values& out) {
            for (const auto& s : as<ModelRecord>(r).*member) opt_str(out, s.semantic_type);
        });
}

std::vector<CatalogField> build() {
    std::vector<CatalogField> t;
    using V = const StoreView&;

    // Datasets first so MODELS can wrap them under trained_on.
    add(t, Scope::Dataset, "id", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<DatasetRecord>(r).id)); });
    add(t, Scope::Dataset, "name", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<DatasetRecord>(r).name)); });
    add(t, Scope::Dataset, "version", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<DatasetRecord>(r).version)); });
    add(t, Scope::Dataset, "source", ValueKind::String, true, [](const Record& r, V, Values& out) {
        for (const auto& s : as<DatasetRecord>(r).source) out.emplace_back(str(s));
    });
    add(t, Scope::Dataset, "collection_method", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(str(to_string(as<DatasetRecord>(r).collection_method)));
        });
    add(t, Scope::Dataset, "annotator_count", ValueKind::Number, false,
        [](const Record& r, V, Values& out) {
            const auto& d = as<DatasetRecord>(r);
            if (d.annotator_count) {
                out.emplace_back(num(static_cast<double>(*d.annotator_count)));
            } else {
                out.emplace_back(std::nullopt);
            }
        });
    add(t, Scope::Dataset, "license", ValueKind::String, false,
        [](const Record& r, V, Values& out) { opt_str(out, as<DatasetRecord>(r).license); });
    add(t, Scope::Dataset, "contains_sensitive_data", ValueKind::Bool, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(Value{as<DatasetRecord>(r).contains_sensitive_data});
        });
    add(t, Scope::Dataset, "modality", ValueKind::String, false, [](const Record& r, V, Values& out) {
        out.emplace_back(str(to_string(as<DatasetRecord>(r).modality)));
    });
    add(t, Scope::Dataset, "instance_count", ValueKind::Number, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(num(static_cast<double>(as<DatasetRecord>(r).instance_count)));
        });
    add(t, Scope::Dataset, "provenance.origin", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(str(to_string(as<DatasetRecord>(r).provenance.origin)));
        });
    add(t, Scope::Dataset, "provenance.source_name", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            opt_str(out, as<DatasetRecord>(r).provenance.source_name);
        });

    std::size_t dataset_fields = t.size();

    add(t, Scope::Model, "id", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<ModelRecord>(r).id)); });
    add(t, Scope::Model, "name", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<ModelRecord>(r).name)); });
    add(t, Scope::Model, "version", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<ModelRecord>(r).version)); });
    add(t, Scope::Model, "task", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<ModelRecord>(r).task)); });
    add(t, Scope::Model, "architecture.family", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(str(as<ModelRecord>(r).architecture.family));
        });
    add(t, Scope::Model, "architecture.parameter_count", ValueKind::Number, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(num(static_cast<double>(as<ModelRecord>(r).architecture.parameter_count)));
        });
    add(t, Scope::Model, "architecture.description", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            opt_str(out, as<ModelRecord>(r).architecture.description);
        });
    add(t, Scope::Model, "tags", ValueKind::String, true, [](const Record& r, V, Values& out) {
        for (const auto& tag : as<ModelRecord>(r).tags) out.emplace_back(str(tag));
    });
    add_io(t, "input_signature", &ModelRecord::input_signature);
    add_io(t, "output_signature", &ModelRecord::output_signature);
    add(t, Scope::Model, "hyperparameters.name", ValueKind::String, true,
        [](const Record& r, V, Values& out) {
            for (const auto& h : as<ModelRecord>(r).hyperparameters) out.emplace_back(str(h.name));
        });
    add(t, Scope::Model, "transformations.name", ValueKind::String, true,
        [](const Record& r, V, Values& out) {
            for (const auto& s : as<ModelRecord>(r).transformations) out.emplace_back(str(s.name));
        });
    add(t, Scope::Model, "source.origin", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(str(to_string(as<ModelRecord>(r).source.origin)));
        });
    add(t, Scope::Model, "source.source_name", ValueKind::String, false,
        [](const Record& r, V, Values& out) { opt_str(out, as<ModelRecord>(r).source.source_name); });
    add(t, Scope::Model, "created_at", ValueKind::String, false,
        [](const Record& r, V, Values& out) {
            out.emplace_back(str(as<ModelRecord>(r).created_at.to_string()));
        });

    // trained_on.<dataset field>: existential over the referenced datasets.
    // No datasets at all, or a reference that does not resolve, is missing
    // metadata.
    for (std::size_t i = 0; i < dataset_fields; ++i) {
        Extractor inner = t[i].extract;
        add(t, Scope::Model, "trained_on." + t[i].info.path, t[i].info.type, true,
            [inner](const Record& r, V view, Values& out) {
                const auto& m = as<ModelRecord>(r);
                if (m.trained_on.empty()) {
                    out.emplace_back(std::nullopt);
                    return;
                }
                for (const auto& ref : m.trained_on) {
                    const Record* ds = view.find(Kind::Dataset, ref.id);
                    if (!ds || std::get<DatasetRecord>(*ds).version != ref.version) {
                        out.emplace_back(std::nullopt);
                        continue;
                    }
                    inner(*ds, view, out);
                }
            });
    }

    add(t, Scope::Instance, "id", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<DataInstance>(r).id)); });
    add(t, Scope::Instance, "locator", ValueKind::String, false,
        [](const Record& r, V, Values& out) { out.emplace_back(str(as<DataInstance>(r).locator)); });
    // A label matches by concept IRI or by the concept's human-readable label.
    add(t, Scope::Instance, "labels", ValueKind::String, true, [](const Record& r, V view, Values& out) {
        for (const auto& iri : as<DataInstance>(r).labels) {
            out.emplace_back(str(iri));
            if (const Record* c = view.find(Kind::Concept, iri)) {
                const auto& label = std::get<SemanticConcept>(*c).label;
                if (label != iri) out.emplace_back(str(label));
            }
        }
    });
    add(t, Scope::Instance, "split", ValueKind::String, false, [](const Record& r, V, Values& out) {
        out.emplace_back(str(to_string(as<DataInstance>(r).split)));
    });
    add(t, Scope::Instance, "sensitive", ValueKind::Bool, false,
        [](const Record& r, V, Values& out) { out.emplace_back(Value{as<DataInstance>(r).sensitive}); });
    return t;
}

}  // namespace

const std::vector<CatalogField>& catalog() {
    static const std::vector<CatalogField> kCatalog = build();
    return kCatalog;
}

std::optional<std::size_t> find_field(Scope scope, std::string_view path) {
    const auto& c = catalog();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].info.scope == scope && c[i].info.path == path) return i;
    }
    return std::nullopt;
}

}  // namespace mz::mql::detail

namespace mz::mql {

const std::vector<FieldInfo>& field_catalog() {
    static const std::vector<FieldInfo> kInfos = [] {
        std::vector<FieldInfo> out;
        for (const auto& f : detail::catalog()) out.push_back(f.info);
        return out;
    }();
    return kInfos;
}

}  // namespace mz::mql
