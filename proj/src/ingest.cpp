#include "mz/ingest.hpp"

#include "mz/codec.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mz {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IngestError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

struct TaskShape {
    const char* input_type;
    DType input_dtype;
    const char* output_type;
    DType output_dtype;
    Modality modality;
};

// Signature inference for zoo tasks. Unlisted tasks get untyped bytes.
std::optional<TaskShape> task_shape(std::string_view task) {
    static const std::map<std::string, TaskShape, std::less<>> kTable{
        {"image-classification", {"image", DType::Float32, "class-label", DType::Float32, Modality::Image}},
        {"object-detection", {"image", DType::Float32, "bounding-boxes", DType::Float32, Modality::Image}},
        {"person-detection", {"image", DType::Float32, "bounding-boxes", DType::Float32, Modality::Image}},
        {"image-segmentation", {"image", DType::Float32, "segmentation-mask", DType::Int64, Modality::Image}},
        {"text-classification", {"text", DType::String, "class-label", DType::Float32, Modality::Text}},
        {"token-classification", {"token-sequence", DType::String, "tag-sequence", DType::String, Modality::Text}},
        {"pos-tagging", {"token-sequence", DType::String, "tag-sequence", DType::String, Modality::Text}},
        {"text-generation", {"text", DType::String, "text", DType::String, Modality::Text}},
        {"fill-mask", {"text", DType::String, "text", DType::String, Modality::Text}},
        {"translation", {"text", DType::String, "text", DType::String, Modality::Text}},
        {"summarization", {"text", DType::String, "text", DType::String, Modality::Text}},
        {"automatic-speech-recognition", {"audio", DType::Float32, "text", DType::String, Modality::Audio}},
        {"audio-classification", {"audio", DType::Float32, "class-label", DType::Float32, Modality::Audio}},
    };
    auto it = kTable.find(task);
    if (it == kTable.end()) return std::nullopt;
    return it->second;
}

struct DatasetName {
    std::string name;
    std::string version;
};

std::string normalize_version(const Json* v) {
    if (!v || v->is_null()) return "0.0";
    std::string s = v->is_string() ? v->get<std::string>() : v->dump();
    if (s.empty() || s == "unknown") return "0.0";
    return s;
}

// Existing dataset with that name and version, else a stub.
DatasetRef resolve_dataset(const DatasetName& d, const StoreView& store, const std::string& zoo,
                           Modality modality, std::vector<DatasetRecord>& stubs) {
    if (const Record* r = store.get(Kind::Dataset, d.name, d.version)) {
        return DatasetRef{id_of(*r), d.version};
    }
    std::string id = "dataset:" + d.name + "@" + d.version;
    if (std::none_of(stubs.begin(), stubs.end(), [&](const DatasetRecord& s) { return s.id == id; })) {
        DatasetRecord stub;
        stub.id = id;
        stub.name = d.name;
        stub.version = d.version;
        stub.collection_method = CollectionMethod::Unknown;
        stub.modality = modality;
        stub.provenance = Provenance{Origin::ExternalZoo, zoo, std::nullopt, std::nullopt, std::nullopt};
        stubs.push_back(std::move(stub));
    }
    return DatasetRef{id, d.version};
}

bool same_bytes(const Record& a, const Record& b) {
    return canonical_bytes_unchecked(a) == canonical_bytes_unchecked(b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Manual
// ---------------------------------------------------------------------------

PutResult ingest_manual(Store& store, Record record) {
    provenance_of(record).origin = Origin::Manual;
    return store.put(record);
}

std::vector<Record> read_envelopes(const fs::path& file) {
    Json j;
    try {
        j = Json::parse(read_file(file));
    } catch (const Json::parse_error& e) {
        throw DecodeError(file.string(), std::string("invalid JSON: ") + e.what());
    }
    std::vector<Record> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(decode_envelope(e));
    } else {
        out.push_back(decode_envelope(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cards
// ---------------------------------------------------------------------------

RawCard parse_card(const Json& j) {
    if (!j.is_object()) throw DecodeError("<root>", "card must be an object");
    if (!j.contains("identifier") || !j.at("identifier").is_string() ||
        j.at("identifier").get<std::string>().empty()) {
        throw DecodeError("identifier", "missing required field");
    }
    RawCard card;
    card.identifier = j.at("identifier").get<std::string>();
    if (j.contains("fields")) {
        if (!j.at("fields").is_object()) throw DecodeError("fields", "expected object");
        card.fields = j.at("fields");
    }
    if (j.contains("body_text")) {
        if (!j.at("body_text").is_string()) throw DecodeError("body_text", "expected string");
        card.body_text = j.at("body_text").get<std::string>();
    }
    return card;
}

Json to_json(const RawCard& card) {
    return Json{{"identifier", card.identifier}, {"fields", card.fields}, {"body_text", card.body_text}};
}

Json to_json(const MappingReport& report) {
    Json violations = Json::array();
    for (const auto& v : report.validation.violations) {
        violations.push_back({{"path", v.path}, {"reason", v.reason}});
    }
    return Json{{"identifier", report.identifier},
                {"mapped", report.mapped},
                {"unmapped", report.unmapped},
                {"notes", report.notes},
                {"violations", std::move(violations)}};
}

std::vector<Record> MappedCard::records() const {
    std::vector<Record> out;
    out.emplace_back(raw);
    for (const auto& h : hardware) out.emplace_back(h);
    for (const auto& d : datasets) out.emplace_back(d);
    out.emplace_back(model);
    for (const auto& r : runs) out.emplace_back(r);
    return out;
}

std::vector<CardFile> HuggingFaceAdapter::list_models(const fs::path& source) const {
    std::error_code ec;
    if (!fs::is_directory(source, ec)) throw IngestError("not a readable directory: " + source.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(source, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    if (ec) throw IngestError("cannot list " + source.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());

    std::vector<CardFile> out;
    for (const auto& f : files) {
        CardFile cf{f.filename().string(), std::nullopt, {}};
        try {
            cf.card = parse_card(Json::parse(read_file(f)));
        } catch (const Json::parse_error& e) {
            cf.error = std::string("invalid JSON: ") + e.what();
        } catch (const Error& e) {
            cf.error = e.what();
        }
        out.push_back(std::move(cf));
    }
    return out;
}

RawCard HuggingFaceAdapter::fetch_card(const fs::path& source, std::string_view identifier) const {
    for (auto& cf : list_models(source)) {
        if (cf.card && cf.card->identifier == identifier) return std::move(*cf.card);
    }
    throw NotFoundError("no card '" + std::string(identifier) + "' in " + source.string());
}

MappedCard HuggingFaceAdapter::map_card(const RawCard& card, const StoreView& store) const {
    const std::string zoo = zoo_name();
    const Json& f = card.fields;
    MappedCard out;
    MappingReport& rep = out.report;
    rep.identifier = card.identifier;
    std::set<std::string> consumed;
    auto take = [&](const char* key) -> const Json* {
        if (!f.contains(key)) return nullptr;
        consumed.insert(key);
        rep.mapped.emplace_back(key);
        return &f.at(key);
    };
    auto string_field = [&](const char* key) -> std::optional<std::string> {
        if (!f.contains(key) || !f.at(key).is_string()) return std::nullopt;
        take(key);
        return f.at(key).get<std::string>();
    };

    // Verbatim payload, content-addressed so a changed card is a new record.
    Json verbatim = to_json(card);
    out.raw.id = "rawcard:" + zoo + ":" + card.identifier + "@" + hex32(crc32c(verbatim.dump()));
    out.raw.zoo = zoo;
    out.raw.identifier = card.identifier;
    out.raw.fields = card.fields;
    out.raw.body_text = card.body_text;
    out.raw.provenance = Provenance{Origin::ExternalZoo, zoo, "https://huggingface.co/" + card.identifier,
                                    std::nullopt, std::nullopt};

    ModelRecord& m = out.model;
    std::string revision = "0.0";
    if (auto v = string_field("sha")) {
        revision = *v;
    } else if (auto v2 = string_field("version")) {
        revision = *v2;
    }
    m.name = card.identifier;
    m.version = revision + "+" + zoo;
    m.id = zoo + ":" + card.identifier + "@" + revision;
    m.source = Provenance{Origin::ExternalZoo, zoo, "https://huggingface.co/" + card.identifier,
                          std::nullopt, out.raw.id};

    if (auto task = string_field("pipeline_tag")) {
        m.task = *task;
        if (!is_curated_task(m.task)) rep.notes.push_back("task '" + m.task + "' is not a curated task");
    } else {
        m.task = "unknown";
        rep.notes.emplace_back("pipeline_tag: absent, task set to 'unknown'");
    }

    auto shape = task_shape(m.task);
    if (shape) {
        m.input_signature.push_back(IOSpec{"input", shape->input_dtype, {std::nullopt}, shape->input_type});
        m.output_signature.push_back(IOSpec{"output", shape->output_dtype, {std::nullopt}, shape->output_type});
    } else {
        m.input_signature.push_back(IOSpec{"input", DType::Bytes, {std::nullopt}, std::nullopt});
        m.output_signature.push_back(IOSpec{"output", DType::Bytes, {std::nullopt}, std::nullopt});
        rep.notes.push_back("no signature known for task '" + m.task + "'; signatures left untyped");
    }
    Modality modality = shape ? shape->modality : Modality::Multimodal;

    m.architecture.family = string_field("model_type").value_or("unknown");
    if (f.contains("parameter_count") && f.at("parameter_count").is_number_integer()) {
        take("parameter_count");
        m.architecture.parameter_count = f.at("parameter_count").get<std::int64_t>();
    }
    if (const Json* tags = take("tags")) {
        if (tags->is_array()) {
            for (const auto& t : *tags) {
                if (t.is_string() && !t.get<std::string>().empty()) m.tags.insert(t.get<std::string>());
            }
        }
    }
    if (auto lib = string_field("library_name")) m.tags.insert("library:" + *lib);

    m.created_at = Timestamp::from_millis(0);
    if (auto lm = string_field("last_modified")) {
        if (auto ts = Timestamp::parse(*lm)) {
            m.created_at = *ts;
        } else {
            rep.notes.push_back("last_modified: unparseable timestamp '" + *lm + "'");
        }
    }

    // datasets -> trained_on
    std::map<std::string, std::string> dataset_versions;
    if (const Json* ds = take("datasets")) {
        if (!ds->is_array()) {
            rep.notes.emplace_back("datasets: expected a list");
        } else {
            for (const auto& d : *ds) {
                DatasetName name;
                if (d.is_string()) {
                    name = {d.get<std::string>(), "0.0"};
                } else if (d.is_object() && d.contains("name") && d.at("name").is_string()) {
                    const Json* v = d.contains("version") ? &d.at("version") : nullptr;
                    name = {d.at("name").get<std::string>(), normalize_version(v)};
                } else {
                    rep.notes.push_back("datasets: skipped entry " + d.dump());
                    continue;
                }
                if (name.name.empty()) continue;
                dataset_versions.emplace(name.name, name.version);
                auto ref = resolve_dataset(name, store, zoo, modality, out.datasets);
                if (std::find(m.trained_on.begin(), m.trained_on.end(), ref) == m.trained_on.end()) {
                    m.trained_on.push_back(ref);
                }
            }
        }
    } else {
        rep.unmapped.emplace_back("datasets: unmapped/absent");
    }

    // metrics -> evaluation runs on the unspecified hardware
    if (const Json* metrics = take("metrics")) {
        std::string hw_id = "hw:unspecified";
        if (!metrics->is_array()) {
            rep.notes.emplace_back("metrics: expected a list");
        }
        std::size_t index = 0;
        for (const auto& entry : metrics->is_array() ? *metrics : Json::array()) {
            std::string path = "metrics[" + std::to_string(index++) + "]";
            if (!entry.is_object()) {
                rep.unmapped.push_back(path + ": not an object");
                continue;
            }
            std::optional<DatasetRef> target;
            if (entry.contains("dataset") && entry.at("dataset").is_string()) {
                std::string name = entry.at("dataset").get<std::string>();
                auto it = dataset_versions.find(name);
                target = resolve_dataset({name, it == dataset_versions.end() ? "0.0" : it->second}, store,
                                         zoo, modality, out.datasets);
            } else if (!m.trained_on.empty()) {
                target = m.trained_on.front();
            }
            if (!target) {
                rep.unmapped.push_back(path + ": no dataset to attach the metrics to");
                continue;
            }
            std::optional<std::string> slice;
            if (entry.contains("slice") && entry.at("slice").is_string()) slice = entry.at("slice").get<std::string>();

            EvaluationRun run;
            run.id = m.id + "/card-metrics/" + std::to_string(index - 1);
            run.model_id = m.id;
            run.dataset_id = *target;
            run.hardware_id = hw_id;
            run.executed_at = m.created_at;
            run.executor = Provenance{Origin::ExternalZoo, zoo, std::nullopt, std::nullopt, out.raw.id};
            for (const auto& [key, value] : entry.items()) {
                if (key == "dataset" || key == "slice") continue;
                MetricValue mv;
                mv.name = key;
                mv.slice = slice;
                if (value.is_number()) {
                    mv.value = value.get<double>();
                } else {
                    // Left for validation to reject rather than silently dropped.
                    mv.value = std::nan("");
                    rep.notes.push_back(path + "." + key + ": value is not a number");
                }
                if (auto polarity = known_metric_polarity(key)) {
                    mv.higher_is_better = *polarity;
                } else {
                    mv.higher_is_better = true;
                    rep.notes.push_back(path + "." + key + ": unknown metric, higher_is_better assumed");
                }
                run.metrics.push_back(std::move(mv));
            }
            if (run.metrics.empty()) {
                rep.unmapped.push_back(path + ": no metric values");
                continue;
            }
            out.runs.push_back(std::move(run));
        }
        if (!out.runs.empty()) {
            HardwareProfile hw;
            hw.id = hw_id;
            hw.name = "unspecified";
            hw.device_class = DeviceClass::Unspecified;
            hw.cpu = "unspecified";
            hw.provenance = Provenance{Origin::ExternalZoo, zoo, std::nullopt, std::nullopt, std::nullopt};
            if (!store.find(Kind::Hardware, hw_id)) {
                out.hardware.push_back(std::move(hw));
            }
        }
    }

    for (const auto& [key, value] : f.items()) {
        if (!consumed.count(key)) rep.unmapped.push_back(key);
    }
    for (const auto& r : out.records()) {
        for (auto& v : validate(r).violations) {
            rep.validation.violations.push_back({std::string(kind_name(kind_of(r))) + ":" + id_of(r) + "." + v.path,
                                                 v.reason});
        }
    }
    return out;
}

std::unique_ptr<ZooAdapter> make_adapter(std::string_view zoo) {
    if (zoo == "huggingface" || zoo == "hf") return std::make_unique<HuggingFaceAdapter>();
    return nullptr;
}

// ---------------------------------------------------------------------------
// Crawl and audit
// ---------------------------------------------------------------------------

Json to_json(const CrawlSummary& s) {
    Json reports = Json::array();
    for (const auto& r : s.reports) reports.push_back(to_json(r));
    Json quarantined = Json::array();
    for (const auto& q : s.quarantined) {
        quarantined.push_back({{"file", q.file}, {"identifier", q.identifier}, {"reason", q.reason}});
    }
    return Json{{"zoo", s.zoo},
                {"cards", s.cards},
                {"stored", s.stored},
                {"quarantined_count", s.quarantined.size()},
                {"new_records", s.new_records},
                {"reports", std::move(reports)},
                {"quarantined", std::move(quarantined)}};
}

CrawlSummary crawl(Store& store, const ZooAdapter& adapter, const fs::path& fixture_dir) {
    CrawlSummary summary;
    summary.zoo = adapter.zoo_name();
    for (auto& cf : adapter.list_models(fixture_dir)) {
        ++summary.cards;
        if (!cf.card) {
            summary.quarantined.push_back({cf.file, "", cf.error});
            continue;
        }
        MappedCard mapped;
        std::string conflict;
        {
            auto view = store.view();
            mapped = adapter.map_card(*cf.card, view);
            // Refuse the whole card up front rather than storing part of it.
            for (const auto& r : mapped.records()) {
                const Record* existing = view.get(RecordKey{kind_of(r), id_of(r)});
                if (existing && !same_bytes(*existing, r)) {
                    conflict = "conflicts with stored " + to_string(RecordKey{kind_of(r), id_of(r)});
                    break;
                }
                std::string version = version_of(r);
                if (!existing && !version.empty()) {
                    if (const Record* other = view.get(kind_of(r), name_of(r), version)) {
                        conflict = "version conflict with stored " + to_string(RecordKey{kind_of(r), id_of(*other)});
                        break;
                    }
                }
            }
        }
        summary.reports.push_back(mapped.report);
        if (!mapped.report.validation.ok()) {
            summary.quarantined.push_back({cf.file, cf.card->identifier,
                                           "validation failed: " + mapped.report.validation.to_string()});
            continue;
        }
        if (!conflict.empty()) {
            summary.quarantined.push_back({cf.file, cf.card->identifier, conflict});
            continue;
        }
        try {
            std::size_t added = 0;
            for (const auto& r : mapped.records()) added += store.put(r).created ? 1 : 0;
            summary.new_records += added;
            ++summary.stored;
        } catch (const Error& e) {
            spdlog::warn("crawl: card {} failed after a partial write: {}", cf.card->identifier, e.what());
            summary.quarantined.push_back({cf.file, cf.card->identifier, e.what()});
        }
    }
    return summary;
}

std::vector<AuditMismatch> audit(const Store& store, const ZooAdapter& adapter) {
    std::vector<AuditMismatch> out;
    auto view = store.view();
    for (const Record* r : view.scan(Kind::RawCard)) {
        const auto& raw = std::get<RawCardRecord>(*r);
        if (raw.zoo != adapter.zoo_name()) continue;
        RawCard card{raw.identifier, raw.fields, raw.body_text};
        MappedCard mapped = adapter.map_card(card, view);
        for (const auto& rec : mapped.records()) {
            const Record* stored = view.get(RecordKey{kind_of(rec), id_of(rec)});
            if (!stored) {
                out.push_back({raw.id, id_of(rec), "re-mapped record is not in the store"});
            } else if (!same_bytes(*stored, rec)) {
                out.push_back({raw.id, id_of(rec), "canonical bytes differ"});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

SimulatedExecutor::SimulatedExecutor(Json manifest) : manifest_(std::move(manifest)) {
    if (!manifest_.is_array()) throw ExecutorError("manifest must be a JSON array");
}

SimulatedExecutor SimulatedExecutor::from_file(const fs::path& manifest) {
    try {
        return SimulatedExecutor(Json::parse(read_file(manifest)));
    } catch (const Json::parse_error& e) {
        throw ExecutorError("manifest " + manifest.string() + ": " + e.what());
    }
}

std::vector<MetricValue> SimulatedExecutor::run(const ModelRecord& model, const DatasetRecord& dataset,
                                                const HardwareProfile& hardware, std::uint64_t /*seed*/) {
    auto matches = [](const Json& e, const char* key, const std::string& id, const std::string& name) {
        if (!e.contains(key) || !e.at(key).is_string()) return false;
        const auto& v = e.at(key).get_ref<const std::string&>();
        return v == id || v == name;
    };
    for (const auto& e : manifest_) {
        if (!matches(e, "model", model.id, model.name) || !matches(e, "dataset", dataset.id, dataset.name) ||
            !matches(e, "hardware", hardware.id, hardware.name)) {
            continue;
        }
        if (!e.contains("metrics") || !e.at("metrics").is_object()) {
            throw ExecutorError("manifest entry for " + model.id + " has no metrics object");
        }
        std::vector<MetricValue> out;
        for (const auto& [name, v] : e.at("metrics").items()) {
            MetricValue mv;
            mv.name = name;
            const Json* value = &v;
            if (v.is_object()) {
                if (!v.contains("value")) throw ExecutorError("metric '" + name + "' has no value");
                value = &v.at("value");
                if (v.contains("unit") && v.at("unit").is_string()) mv.unit = v.at("unit").get<std::string>();
                if (v.contains("slice") && v.at("slice").is_string()) mv.slice = v.at("slice").get<std::string>();
                if (v.contains("higher_is_better") && v.at("higher_is_better").is_boolean()) {
                    mv.higher_is_better = v.at("higher_is_better").get<bool>();
                } else if (auto p = known_metric_polarity(name)) {
                    mv.higher_is_better = *p;
                } else {
                    throw ExecutorError("metric '" + name + "' has no known polarity");
                }
            } else if (auto p = known_metric_polarity(name)) {
                mv.higher_is_better = *p;
            } else {
                throw ExecutorError("metric '" + name + "' has no known polarity");
            }
            if (!value->is_number()) throw ExecutorError("metric '" + name + "' is not a number");
            mv.value = value->get<double>();
            out.push_back(std::move(mv));
        }
        return out;
    }
    throw ExecutorError("no manifest entry for model " + model.id + ", dataset " + dataset.id +
                        ", hardware " + hardware.id);
}

namespace {

// By id, else by name: latest version for versioned kinds, unique otherwise.
const Record* resolve_ref(const StoreView& view, Kind kind, std::string_view ref) {
    if (const Record* r = view.find(kind, ref)) return r;
    if (kind == Kind::Model || kind == Kind::Dataset) return view.latest(kind, ref);
    auto by_name = view.scan(kind, ScanFilter{IndexedField::Name, std::string(ref)});
    return by_name.empty() ? nullptr : by_name.front();
}

}  // namespace

RecordKey run_evaluation(Store& store, Executor& executor, std::string_view model,
                         std::string_view dataset, std::string_view hardware, std::uint64_t seed,
                         const Clock& clock) {
    EvaluationRun run;
    {
        auto view = store.view();
        const Record* m = resolve_ref(view, Kind::Model, model);
        if (!m) throw IngestError("unknown model '" + std::string(model) + "'");
        const Record* d = resolve_ref(view, Kind::Dataset, dataset);
        if (!d) throw IngestError("unknown dataset '" + std::string(dataset) + "'");
        const Record* h = resolve_ref(view, Kind::Hardware, hardware);
        if (!h) throw IngestError("unknown hardware '" + std::string(hardware) + "'");
        const auto& mr = std::get<ModelRecord>(*m);
        const auto& dr = std::get<DatasetRecord>(*d);
        const auto& hr = std::get<HardwareProfile>(*h);

        try {
            run.metrics = executor.run(mr, dr, hr, seed);
        } catch (const ExecutorError&) {
            throw;
        } catch (const std::exception& e) {
            throw ExecutorError("executor '" + executor.name() + "' failed on " + mr.id + ": " + e.what());
        }
        // Runs are events: the sequence number keeps repeated runs distinct.
        std::size_t seq = view.scan(Kind::Evaluation, ScanFilter{IndexedField::ModelId, mr.id}).size() + 1;
        run.id = "run:" + mr.id + ":" + dr.id + "@" + dr.version + ":" + hr.id + ":seed" +
                 std::to_string(seed) + ":" + std::to_string(seq);
        run.model_id = mr.id;
        run.dataset_id = DatasetRef{dr.id, dr.version};
        run.hardware_id = hr.id;
        run.executed_at = clock();
        run.executor = Provenance{Origin::EvaluationHarness, executor.name(), std::nullopt, std::nullopt,
                                  std::nullopt};
        if (auto report = validate(Record{run}, view); !report.ok()) throw ValidationError(std::move(report));
    }
    return store.put(run).key;
}

}  // namespace mz
