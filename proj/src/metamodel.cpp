#include "mz/metamodel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <utility>

namespace mz {

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<DType, 5> kDTypes{{{DType::Float32, "float32"},
                                       {DType::Int64, "int64"},
                                       {DType::String, "string"},
                                       {DType::Bytes, "bytes"},
                                       {DType::Bool, "bool"}}};
constexpr NameTable<ValueType, 5> kValueTypes{{{ValueType::Int, "int"},
                                               {ValueType::Float, "float"},
                                               {ValueType::String, "string"},
                                               {ValueType::Bool, "bool"},
                                               {ValueType::Enum, "enum"}}};
constexpr NameTable<CollectionMethod, 6> kCollectionMethods{
    {{CollectionMethod::Crowdsourced, "crowdsourced"},
     {CollectionMethod::Scraped, "scraped"},
     {CollectionMethod::Synthetic, "synthetic"},
     {CollectionMethod::Curated, "curated"},
     {CollectionMethod::Derived, "derived"},
     {CollectionMethod::Unknown, "unknown"}}};
constexpr NameTable<Modality, 5> kModalities{{{Modality::Image, "image"},
                                              {Modality::Text, "text"},
                                              {Modality::Audio, "audio"},
                                              {Modality::Tabular, "tabular"},
                                              {Modality::Multimodal, "multimodal"}}};
constexpr NameTable<Split, 4> kSplits{{{Split::Train, "train"},
                                       {Split::Validation, "validation"},
                                       {Split::Test, "test"},
                                       {Split::Unsplit, "unsplit"}}};
constexpr NameTable<DeviceClass, 5> kDeviceClasses{{{DeviceClass::Cloud, "cloud"},
                                                    {DeviceClass::Workstation, "workstation"},
                                                    {DeviceClass::Edge, "edge"},
                                                    {DeviceClass::Mobile, "mobile"},
                                                    {DeviceClass::Unspecified, "unspecified"}}};
constexpr NameTable<Origin, 3> kOrigins{{{Origin::Manual, "manual"},
                                         {Origin::ExternalZoo, "external_zoo"},
                                         {Origin::EvaluationHarness, "evaluation_harness"}}};
constexpr NameTable<Kind, kKindCount> kKinds{{{Kind::Model, "ModelRecord"},
                                              {Kind::Dataset, "DatasetRecord"},
                                              {Kind::Instance, "DataInstance"},
                                              {Kind::Prediction, "PredictionRecord"},
                                              {Kind::Concept, "SemanticConcept"},
                                              {Kind::Hardware, "HardwareProfile"},
                                              {Kind::Evaluation, "EvaluationRun"},
                                              {Kind::RawCard, "RawCard"}}};

template <typename E, std::size_t N>
std::string_view lookup_name(const NameTable<E, N>& table, E value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup_value(const NameTable<E, N>& table, std::string_view name) {
    for (const auto& [v, n] : table) {
        if (n == name) return v;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(DType v) { return lookup_name(kDTypes, v); }
std::string_view to_string(ValueType v) { return lookup_name(kValueTypes, v); }
std::string_view to_string(CollectionMethod v) { return lookup_name(kCollectionMethods, v); }
std::string_view to_string(Modality v) { return lookup_name(kModalities, v); }
std::string_view to_string(Split v) { return lookup_name(kSplits, v); }
std::string_view to_string(DeviceClass v) { return lookup_name(kDeviceClasses, v); }
std::string_view to_string(Origin v) { return lookup_name(kOrigins, v); }

std::optional<DType> parse_dtype(std::string_view s) { return lookup_value(kDTypes, s); }
std::optional<ValueType> parse_value_type(std::string_view s) {
    return lookup_value(kValueTypes, s);
}
std::optional<CollectionMethod> parse_collection_method(std::string_view s) {
    return lookup_value(kCollectionMethods, s);
}
std::optional<Modality> parse_modality(std::string_view s) { return lookup_value(kModalities, s); }
std::optional<Split> parse_split(std::string_view s) { return lookup_value(kSplits, s); }
std::optional<DeviceClass> parse_device_class(std::string_view s) {
    return lookup_value(kDeviceClasses, s);
}
std::optional<Origin> parse_origin(std::string_view s) { return lookup_value(kOrigins, s); }

std::string_view kind_name(Kind k) { return lookup_name(kKinds, k); }
std::optional<Kind> parse_kind(std::string_view name) { return lookup_value(kKinds, name); }

Kind kind_of(const Record& r) { return static_cast<Kind>(r.index()); }

const std::string& id_of(const Record& r) {
    return std::visit(
        [](const auto& rec) -> const std::string& {
            using T = std::decay_t<decltype(rec)>;
            if constexpr (std::is_same_v<T, SemanticConcept>) {
                return rec.iri;
            } else {
                return rec.id;
            }
        },
        r);
}

std::string name_of(const Record& r) {
    return std::visit(
        [](const auto& rec) -> std::string {
            using T = std::decay_t<decltype(rec)>;
            if constexpr (std::is_same_v<T, ModelRecord> || std::is_same_v<T, DatasetRecord> ||
                          std::is_same_v<T, HardwareProfile>) {
                return rec.name;
            } else if constexpr (std::is_same_v<T, SemanticConcept>) {
                return rec.iri;
            } else {
                return rec.id;
            }
        },
        r);
}

std::string version_of(const Record& r) {
    if (const auto* m = std::get_if<ModelRecord>(&r)) return m->version;
    if (const auto* d = std::get_if<DatasetRecord>(&r)) return d->version;
    return {};
}

const Provenance& provenance_of(const Record& r) {
    return provenance_of(const_cast<Record&>(r));
}

Provenance& provenance_of(Record& r) {
    return std::visit(
        [](auto& rec) -> Provenance& {
            using T = std::decay_t<decltype(rec)>;
            if constexpr (std::is_same_v<T, ModelRecord>) {
                return rec.source;
            } else if constexpr (std::is_same_v<T, EvaluationRun>) {
                return rec.executor;
            } else {
                return rec.provenance;
            }
        },
        r);
}

// ---------------------------------------------------------------------------
// Versions
// ---------------------------------------------------------------------------

namespace {

bool split_numeric(std::string_view v, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        auto dot = v.find('.', start);
        auto seg = v.substr(start, dot == std::string_view::npos ? v.size() - start : dot - start);
        if (seg.empty()) return false;
        for (char c : seg) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        }
        out.push_back(seg);
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
}

std::strong_ordering compare_numeric_segment(std::string_view a, std::string_view b) {
    auto strip = [](std::string_view s) {
        auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
    };
    a = strip(a);
    b = strip(b);
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.compare(b) <=> 0;
}

}  // namespace

std::strong_ordering compare_versions(std::string_view a, std::string_view b) {
    std::vector<std::string_view> sa, sb;
    if (split_numeric(a, sa) && split_numeric(b, sb)) {
        for (std::size_t i = 0; i < std::min(sa.size(), sb.size()); ++i) {
            auto c = compare_numeric_segment(sa[i], sb[i]);
            if (c != 0) return c;
        }
        if (sa.size() != sb.size()) return sa.size() <=> sb.size();
    }
    return a.compare(b) <=> 0;
}

std::optional<bool> known_metric_polarity(std::string_view name) {
    static constexpr std::array<std::pair<std::string_view, bool>, 14> kKnown{{
        {"accuracy", true},
        {"map", true},
        {"miou", true},
        {"f1", true},
        {"precision", true},
        {"recall", true},
        {"mse", false},
        {"latency_ms", false},
        {"memory_footprint_mb", false},
        {"demographic_parity_gap", false},
        {"error_rate", false},
        {"wer", false},
        {"cer", false},
        {"perplexity", false},
    }};
    for (const auto& [n, hib] : kKnown) {
        if (n == name) return hib;
    }
    return std::nullopt;
}

bool is_curated_task(std::string_view task) {
    static constexpr std::array<std::string_view, 8> kTasks{
        "image-classification", "text-classification", "pos-tagging",
        "person-detection",     "text-generation",     "object-detection",
        "image-segmentation",   "token-classification"};
    return std::find(kTasks.begin(), kTasks.end(), task) != kTasks.end();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string ValidationReport::to_string() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.path + ": " + v.reason;
    }
    return out;
}

namespace {

class Checker {
public:
    explicit Checker(const Resolver* resolver) : resolver_(resolver) {}

    void fail(std::string path, std::string reason) {
        report_.violations.push_back({std::move(path), std::move(reason)});
    }

    void non_empty(const std::string& value, const std::string& path) {
        if (value.empty()) fail(path, "must not be empty");
    }

    void provenance(const Provenance& p, const std::string& path) {
        if (p.origin == Origin::ExternalZoo && (!p.source_name || p.source_name->empty())) {
            fail(path + ".source_name", "required when origin is external_zoo");
        }
    }

    void io_list(const std::vector<IOSpec>& specs, const std::string& path) {
        if (specs.empty()) {
            fail(path, "must not be empty");
            return;
        }
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const auto& spec = specs[i];
            std::string p = path + "[" + std::to_string(i) + "]";
            non_empty(spec.name, p + ".name");
            for (std::size_t d = 0; d < spec.shape.size(); ++d) {
                if (spec.shape[d] && *spec.shape[d] <= 0) {
                    fail(p + ".shape[" + std::to_string(d) + "]",
                         "dimension must be positive or '*'");
                }
            }
        }
    }

    void metric(const MetricValue& m, const std::string& path) {
        non_empty(m.name, path + ".name");
        if (!std::isfinite(m.value)) fail(path + ".value", "value not finite");
        if (auto polarity = known_metric_polarity(m.name); polarity && *polarity != m.higher_is_better) {
            fail(path + ".higher_is_better",
                 std::string("metric '") + m.name + "' has fixed polarity " +
                     (*polarity ? "true" : "false"));
        }
    }

    template <typename T>
    const T* resolve(Kind kind, const std::string& id, const std::string& path) {
        if (!resolver_) return nullptr;
        const Record* rec = resolver_->find(kind, id);
        const T* typed = rec ? std::get_if<T>(rec) : nullptr;
        if (!typed) {
            fail(path, "unresolved " + std::string(kind_name(kind)) + " reference '" + id + "'");
        }
        return typed;
    }

    void dataset_ref(const DatasetRef& ref, const std::string& path) {
        non_empty(ref.id, path + ".id");
        if (const auto* ds = resolve<DatasetRecord>(Kind::Dataset, ref.id, path)) {
            if (ds->version != ref.version) {
                fail(path + ".version", "dataset '" + ref.id + "' has version '" + ds->version +
                                            "', not '" + ref.version + "'");
            }
        }
    }

    void operator()(const ModelRecord& m) {
        non_empty(m.id, "id");
        non_empty(m.name, "name");
        non_empty(m.version, "version");
        non_empty(m.task, "task");
        io_list(m.input_signature, "input_signature");
        io_list(m.output_signature, "output_signature");
        for (std::size_t i = 0; i < m.transformations.size(); ++i) {
            non_empty(m.transformations[i].name, "transformations[" + std::to_string(i) + "].name");
        }
        non_empty(m.architecture.family, "architecture.family");
        if (m.architecture.parameter_count < 0) {
            fail("architecture.parameter_count", "must be non-negative");
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < m.hyperparameters.size(); ++i) {
            const auto& hp = m.hyperparameters[i];
            std::string p = "hyperparameters[" + std::to_string(i) + "]";
            non_empty(hp.name, p + ".name");
            if (!seen.insert(hp.name).second) fail(p + ".name", "duplicate hyperparameter name");
            bool typed_ok = false;
            switch (hp.value_type) {
                case ValueType::Int: typed_ok = hp.value.is_number_integer(); break;
                case ValueType::Float:
                    typed_ok = hp.value.is_number() &&
                               std::isfinite(hp.value.get<double>());
                    break;
                case ValueType::String: typed_ok = hp.value.is_string(); break;
                case ValueType::Bool: typed_ok = hp.value.is_boolean(); break;
                case ValueType::Enum:
                    typed_ok = hp.value.is_string() && !hp.value.get<std::string>().empty();
                    break;
            }
            if (!typed_ok) {
                fail(p + ".value", "value does not match type " + std::string(to_string(hp.value_type)));
            }
        }
        for (std::size_t i = 0; i < m.trained_on.size(); ++i) {
            dataset_ref(m.trained_on[i], "trained_on[" + std::to_string(i) + "]");
        }
        for (const auto& tag : m.tags) {
            if (tag.empty()) fail("tags", "tags must not be empty strings");
        }
        provenance(m.source, "source");
    }

    void operator()(const DatasetRecord& d) {
        non_empty(d.id, "id");
        non_empty(d.name, "name");
        non_empty(d.version, "version");
        if (d.annotator_count && *d.annotator_count < 0) {
            fail("annotator_count", "must be non-negative");
        }
        if (d.instance_count < 0) fail("instance_count", "must be non-negative");
        provenance(d.provenance, "provenance");
    }

    void operator()(const DataInstance& inst) {
        non_empty(inst.id, "id");
        non_empty(inst.locator, "locator");
        dataset_ref(inst.dataset_id, "dataset_id");
        for (std::size_t i = 0; i < inst.labels.size(); ++i) {
            resolve<SemanticConcept>(Kind::Concept, inst.labels[i],
                                     "labels[" + std::to_string(i) + "]");
        }
        provenance(inst.provenance, "provenance");
    }

    void operator()(const PredictionRecord& p) {
        non_empty(p.id, "id");
        resolve<ModelRecord>(Kind::Model, p.model_id, "model_id");
        resolve<DataInstance>(Kind::Instance, p.instance_id, "instance_id");
        for (std::size_t i = 0; i < p.predicted.size(); ++i) {
            std::string path = "predicted[" + std::to_string(i) + "]";
            const auto& cs = p.predicted[i];
            if (!std::isfinite(cs.score) || cs.score < 0.0 || cs.score > 1.0) {
                fail(path + ".score", "score must lie in [0,1]");
            }
            resolve<SemanticConcept>(Kind::Concept, cs.concept_iri, path + ".concept");
        }
        provenance(p.provenance, "provenance");
    }

    void operator()(const SemanticConcept& c) {
        non_empty(c.iri, "iri");
        non_empty(c.label, "label");
        non_empty(c.kb_source, "kb_source");
        provenance(c.provenance, "provenance");
    }

    void operator()(const HardwareProfile& h) {
        non_empty(h.id, "id");
        non_empty(h.name, "name");
        if (h.memory_mb) {
            if (*h.memory_mb <= 0) fail("memory_mb", "must be positive");
        } else if (h.device_class != DeviceClass::Unspecified) {
            fail("memory_mb", "required for a concrete device class");
        }
        provenance(h.provenance, "provenance");
    }

    void operator()(const EvaluationRun& run) {
        non_empty(run.id, "id");
        resolve<ModelRecord>(Kind::Model, run.model_id, "model_id");
        dataset_ref(run.dataset_id, "dataset_id");
        resolve<HardwareProfile>(Kind::Hardware, run.hardware_id, "hardware_id");
        if (run.metrics.empty()) fail("metrics", "must not be empty");
        std::set<std::pair<std::string, std::string>> seen;
        for (std::size_t i = 0; i < run.metrics.size(); ++i) {
            const auto& m = run.metrics[i];
            std::string path = "metrics[" + std::to_string(i) + "]";
            metric(m, path);
            if (!seen.emplace(m.name, m.slice.value_or("")).second) {
                fail(path, "duplicate metric for (name, slice)");
            }
        }
        provenance(run.executor, "executor");
    }

    void operator()(const RawCardRecord& c) {
        non_empty(c.id, "id");
        non_empty(c.zoo, "zoo");
        non_empty(c.identifier, "identifier");
        if (!c.fields.is_object()) fail("fields", "must be an object");
        if (c.provenance.origin != Origin::ExternalZoo) {
            fail("provenance.origin", "raw cards originate from an external zoo");
        }
        provenance(c.provenance, "provenance");
    }

    ValidationReport take() { return std::move(report_); }

private:
    const Resolver* resolver_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Record& record) {
    Checker checker(nullptr);
    std::visit(checker, record);
    return checker.take();
}

ValidationReport validate(const Record& record, const Resolver& resolver) {
    Checker checker(&resolver);
    std::visit(checker, record);
    return checker.take();
}

}  // namespace mz
