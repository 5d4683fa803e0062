#include "mz/codec.hpp"

namespace mz {

namespace {

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

Json encode(const Provenance& p) {
    Json j = {{"origin", to_string(p.origin)}};
    put_opt(j, "source_name", p.source_name);
    put_opt(j, "source_url", p.source_url);
    if (p.retrieved_at) j["retrieved_at"] = p.retrieved_at->to_string();
    put_opt(j, "attachment", p.attachment);
    return j;
}

Json encode(const IOSpec& s) {
    Json shape = Json::array();
    for (const auto& d : s.shape) {
        if (d) {
            shape.push_back(*d);
        } else {
            shape.push_back("*");
        }
    }
    Json j = {{"name", s.name}, {"dtype", to_string(s.dtype)}, {"shape", shape}};
    put_opt(j, "semantic_type", s.semantic_type);
    return j;
}

Json encode(const DatasetRef& r) { return {{"id", r.id}, {"version", r.version}}; }

template <typename T>
Json encode_list(const std::vector<T>& items) {
    Json out = Json::array();
    for (const auto& item : items) out.push_back(encode(item));
    return out;
}

Json encode_record(const ModelRecord& m) {
    Json transforms = Json::array();
    for (const auto& t : m.transformations) {
        transforms.push_back({{"name", t.name}, {"parameters", t.parameters}});
    }
    Json arch = {{"family", m.architecture.family},
                 {"parameter_count", m.architecture.parameter_count}};
    put_opt(arch, "description", m.architecture.description);
    Json hps = Json::array();
    for (const auto& h : m.hyperparameters) {
        hps.push_back({{"name", h.name}, {"value_type", to_string(h.value_type)}, {"value", h.value}});
    }
    return {{"id", m.id},
            {"name", m.name},
            {"version", m.version},
            {"task", m.task},
            {"input_signature", encode_list(m.input_signature)},
            {"output_signature", encode_list(m.output_signature)},
            {"transformations", transforms},
            {"architecture", arch},
            {"hyperparameters", hps},
            {"trained_on", encode_list(m.trained_on)},
            {"source", encode(m.source)},
            {"tags", m.tags},
            {"created_at", m.created_at.to_string()}};
}

Json encode_record(const DatasetRecord& d) {
    Json j = {{"id", d.id},
              {"name", d.name},
              {"version", d.version},
              {"source", d.source},
              {"collection_method", to_string(d.collection_method)},
              {"contains_sensitive_data", d.contains_sensitive_data},
              {"modality", to_string(d.modality)},
              {"instance_count", d.instance_count},
              {"provenance", encode(d.provenance)}};
    put_opt(j, "annotator_count", d.annotator_count);
    put_opt(j, "license", d.license);
    return j;
}

Json encode_record(const DataInstance& i) {
    return {{"id", i.id},
            {"dataset_id", encode(i.dataset_id)},
            {"locator", i.locator},
            {"labels", i.labels},
            {"split", to_string(i.split)},
            {"sensitive", i.sensitive},
            {"provenance", encode(i.provenance)}};
}

Json encode_record(const PredictionRecord& p) {
    Json predicted = Json::array();
    for (const auto& cs : p.predicted) {
        predicted.push_back({{"concept", cs.concept_iri}, {"score", cs.score}});
    }
    Json j = {{"id", p.id},
              {"model_id", p.model_id},
              {"instance_id", p.instance_id},
              {"predicted", predicted},
              {"provenance", encode(p.provenance)}};
    put_opt(j, "correct", p.correct);
    return j;
}

Json encode_record(const SemanticConcept& c) {
    return {{"iri", c.iri},
            {"label", c.label},
            {"kb_source", c.kb_source},
            {"provenance", encode(c.provenance)}};
}

Json encode_record(const HardwareProfile& h) {
    Json j = {{"id", h.id},
              {"name", h.name},
              {"device_class", to_string(h.device_class)},
              {"cpu", h.cpu},
              {"provenance", encode(h.provenance)}};
    put_opt(j, "accelerator", h.accelerator);
    put_opt(j, "memory_mb", h.memory_mb);
    return j;
}

Json encode_record(const EvaluationRun& r) {
    Json metrics = Json::array();
    for (const auto& m : r.metrics) metrics.push_back(mz::encode(m));
    return {{"id", r.id},
            {"model_id", r.model_id},
            {"dataset_id", encode(r.dataset_id)},
            {"hardware_id", r.hardware_id},
            {"metrics", metrics},
            {"executed_at", r.executed_at.to_string()},
            {"executor", encode(r.executor)}};
}

Json encode_record(const RawCardRecord& c) {
    return {{"id", c.id},
            {"zoo", c.zoo},
            {"identifier", c.identifier},
            {"fields", c.fields},
            {"body_text", c.body_text},
            {"provenance", encode(c.provenance)}};
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

std::string child(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw DecodeError(path_.empty() ? "<root>" : path_, "expected object");
    }

    const Json* find(const char* key) const {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    const Json& need(const char* key) const {
        const Json* v = find(key);
        if (!v) throw DecodeError(child(path_, key), "missing required field");
        return *v;
    }

    std::string str(const char* key) const { return as_string(need(key), child(path_, key)); }

    std::optional<std::string> opt_str(const char* key) const {
        const Json* v = find(key);
        if (!v) return std::nullopt;
        return as_string(*v, child(path_, key));
    }

    std::int64_t int64(const char* key) const { return as_int(need(key), child(path_, key)); }

    std::optional<std::int64_t> opt_int64(const char* key) const {
        const Json* v = find(key);
        if (!v) return std::nullopt;
        return as_int(*v, child(path_, key));
    }

    bool boolean(const char* key) const {
        const Json& v = need(key);
        if (!v.is_boolean()) throw DecodeError(child(path_, key), "expected boolean");
        return v.get<bool>();
    }

    double number(const char* key) const {
        const Json& v = need(key);
        if (!v.is_number()) throw DecodeError(child(path_, key), "expected number");
        return v.get<double>();
    }

    Timestamp timestamp(const char* key) const {
        auto text = str(key);
        auto ts = Timestamp::parse(text);
        if (!ts) throw DecodeError(child(path_, key), "invalid RFC 3339 timestamp '" + text + "'");
        return *ts;
    }

    template <typename E>
    E enumeration(const char* key, std::optional<E> (*parse)(std::string_view)) const {
        auto text = str(key);
        auto v = parse(text);
        if (!v) throw DecodeError(child(path_, key), "unknown value '" + text + "'");
        return *v;
    }

    // Missing or null is an empty list.
    const Json& array(const char* key) const {
        static const Json kEmpty = Json::array();
        const Json* v = find(key);
        if (!v) return kEmpty;
        if (!v->is_array()) throw DecodeError(child(path_, key), "expected array");
        return *v;
    }

    std::vector<std::string> strings(const char* key) const {
        std::vector<std::string> out;
        const Json& arr = array(key);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(as_string(arr[i], index(child(path_, key), i)));
        }
        return out;
    }

    [[nodiscard]] std::string path(const char* key) const { return child(path_, key); }

    static std::string as_string(const Json& v, const std::string& path) {
        if (!v.is_string()) throw DecodeError(path, "expected string");
        return v.get<std::string>();
    }

    static std::int64_t as_int(const Json& v, const std::string& path) {
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            double d = v.get<double>();
            if (d == static_cast<double>(static_cast<std::int64_t>(d))) {
                return static_cast<std::int64_t>(d);
            }
        }
        throw DecodeError(path, "expected integer");
    }

private:
    const Json& j_;
    std::string path_;
};

Provenance decode_provenance(const Json& j, const std::string& path) {
    Reader r(j, path);
    Provenance p;
    p.origin = r.enumeration<Origin>("origin", parse_origin);
    p.source_name = r.opt_str("source_name");
    p.source_url = r.opt_str("source_url");
    if (r.find("retrieved_at")) p.retrieved_at = r.timestamp("retrieved_at");
    p.attachment = r.opt_str("attachment");
    return p;
}

// Provenance is mandatory on every record, but a missing block on a manual
// submission defaults to {origin: manual}.
Provenance provenance_field(const Reader& r, const char* key) {
    const Json* v = r.find(key);
    if (!v) return Provenance{};
    return decode_provenance(*v, r.path(key));
}

DatasetRef decode_dataset_ref(const Json& j, const std::string& path) {
    Reader r(j, path);
    return DatasetRef{r.str("id"), r.str("version")};
}

std::vector<IOSpec> decode_io(const Reader& r, const char* key) {
    std::vector<IOSpec> out;
    const Json& arr = r.array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string path = index(r.path(key), i);
        Reader s(arr[i], path);
        IOSpec spec;
        spec.name = s.str("name");
        spec.dtype = s.enumeration<DType>("dtype", parse_dtype);
        const Json& shape = s.array("shape");
        for (std::size_t d = 0; d < shape.size(); ++d) {
            if (shape[d].is_string() && shape[d].get<std::string>() == "*") {
                spec.shape.push_back(std::nullopt);
            } else {
                spec.shape.push_back(Reader::as_int(shape[d], index(s.path("shape"), d)));
            }
        }
        spec.semantic_type = s.opt_str("semantic_type");
        out.push_back(std::move(spec));
    }
    return out;
}

ModelRecord decode_model(const Json& j) {
    Reader r(j, "");
    ModelRecord m;
    m.id = r.str("id");
    m.name = r.str("name");
    m.version = r.str("version");
    m.task = r.str("task");
    m.input_signature = decode_io(r, "input_signature");
    m.output_signature = decode_io(r, "output_signature");
    const Json& transforms = r.array("transformations");
    for (std::size_t i = 0; i < transforms.size(); ++i) {
        Reader t(transforms[i], index("transformations", i));
        TransformStep step;
        step.name = t.str("name");
        if (const Json* params = t.find("parameters")) {
            if (!params->is_object()) {
                throw DecodeError(index("transformations", i) + ".parameters", "expected object");
            }
            step.parameters = *params;
        }
        m.transformations.push_back(std::move(step));
    }
    {
        Reader a(r.need("architecture"), "architecture");
        m.architecture.family = a.str("family");
        m.architecture.parameter_count = a.opt_int64("parameter_count").value_or(0);
        m.architecture.description = a.opt_str("description");
    }
    const Json& hps = r.array("hyperparameters");
    for (std::size_t i = 0; i < hps.size(); ++i) {
        Reader h(hps[i], index("hyperparameters", i));
        Hyperparameter hp;
        hp.name = h.str("name");
        hp.value_type = h.enumeration<ValueType>("value_type", parse_value_type);
        hp.value = h.need("value");
        if (hp.value.is_structured()) {
            throw DecodeError(index("hyperparameters", i) + ".value", "expected scalar");
        }
        m.hyperparameters.push_back(std::move(hp));
    }
    const Json& trained = r.array("trained_on");
    for (std::size_t i = 0; i < trained.size(); ++i) {
        m.trained_on.push_back(decode_dataset_ref(trained[i], index("trained_on", i)));
    }
    m.source = provenance_field(r, "source");
    for (auto& tag : r.strings("tags")) m.tags.insert(std::move(tag));
    m.created_at = r.timestamp("created_at");
    return m;
}

DatasetRecord decode_dataset(const Json& j) {
    Reader r(j, "");
    DatasetRecord d;
    d.id = r.str("id");
    d.name = r.str("name");
    d.version = r.str("version");
    d.source = r.strings("source");
    d.collection_method = r.find("collection_method")
                              ? r.enumeration<CollectionMethod>("collection_method",
                                                                parse_collection_method)
                              : CollectionMethod::Unknown;
    d.annotator_count = r.opt_int64("annotator_count");
    d.license = r.opt_str("license");
    d.contains_sensitive_data = r.find("contains_sensitive_data") ? r.boolean("contains_sensitive_data") : false;
    d.modality = r.enumeration<Modality>("modality", parse_modality);
    d.instance_count = r.opt_int64("instance_count").value_or(0);
    d.provenance = provenance_field(r, "provenance");
    return d;
}

DataInstance decode_instance(const Json& j) {
    Reader r(j, "");
    DataInstance i;
    i.id = r.str("id");
    i.dataset_id = decode_dataset_ref(r.need("dataset_id"), "dataset_id");
    i.locator = r.str("locator");
    i.labels = r.strings("labels");
    i.split = r.find("split") ? r.enumeration<Split>("split", parse_split) : Split::Unsplit;
    i.sensitive = r.find("sensitive") ? r.boolean("sensitive") : false;
    i.provenance = provenance_field(r, "provenance");
    return i;
}

PredictionRecord decode_prediction(const Json& j) {
    Reader r(j, "");
    PredictionRecord p;
    p.id = r.str("id");
    p.model_id = r.str("model_id");
    p.instance_id = r.str("instance_id");
    const Json& predicted = r.array("predicted");
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        Reader c(predicted[i], index("predicted", i));
        p.predicted.push_back({c.str("concept"), c.number("score")});
    }
    if (r.find("correct")) p.correct = r.boolean("correct");
    p.provenance = provenance_field(r, "provenance");
    return p;
}

SemanticConcept decode_concept(const Json& j) {
    Reader r(j, "");
    SemanticConcept c;
    c.iri = r.str("iri");
    c.label = r.str("label");
    c.kb_source = r.str("kb_source");
    c.provenance = provenance_field(r, "provenance");
    return c;
}

HardwareProfile decode_hardware(const Json& j) {
    Reader r(j, "");
    HardwareProfile h;
    h.id = r.str("id");
    h.name = r.str("name");
    h.device_class = r.enumeration<DeviceClass>("device_class", parse_device_class);
    h.cpu = r.opt_str("cpu").value_or("");
    h.accelerator = r.opt_str("accelerator");
    h.memory_mb = r.opt_int64("memory_mb");
    h.provenance = provenance_field(r, "provenance");
    return h;
}

EvaluationRun decode_run(const Json& j) {
    Reader r(j, "");
    EvaluationRun run;
    run.id = r.str("id");
    run.model_id = r.str("model_id");
    run.dataset_id = decode_dataset_ref(r.need("dataset_id"), "dataset_id");
    run.hardware_id = r.str("hardware_id");
    const Json& metrics = r.array("metrics");
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        run.metrics.push_back(decode_metric(metrics[i], index("metrics", i)));
    }
    run.executed_at = r.timestamp("executed_at");
    run.executor = provenance_field(r, "executor");
    return run;
}

RawCardRecord decode_raw_card(const Json& j) {
    Reader r(j, "");
    RawCardRecord c;
    c.id = r.str("id");
    c.zoo = r.str("zoo");
    c.identifier = r.str("identifier");
    if (const Json* f = r.find("fields")) {
        if (!f->is_object()) throw DecodeError("fields", "expected object");
        c.fields = *f;
    }
    c.body_text = r.opt_str("body_text").value_or("");
    c.provenance = provenance_field(r, "provenance");
    return c;
}

}  // namespace

Json encode(const MetricValue& m) {
    Json j = {{"name", m.name}, {"value", m.value}, {"higher_is_better", m.higher_is_better}};
    put_opt(j, "unit", m.unit);
    put_opt(j, "slice", m.slice);
    return j;
}

MetricValue decode_metric(const Json& j, const std::string& path) {
    Reader r(j, path);
    MetricValue m;
    m.name = r.str("name");
    m.value = r.number("value");
    m.unit = r.opt_str("unit");
    m.slice = r.opt_str("slice");
    if (r.find("higher_is_better")) {
        m.higher_is_better = r.boolean("higher_is_better");
    } else if (auto polarity = known_metric_polarity(m.name)) {
        m.higher_is_better = *polarity;
    } else {
        throw DecodeError(r.path("higher_is_better"),
                          "required for metric '" + m.name + "' outside the curated list");
    }
    return m;
}

Json encode_body(const Record& record) {
    return std::visit([](const auto& rec) { return encode_record(rec); }, record);
}

Json encode_envelope(const Record& record) {
    return {{"kind", kind_name(kind_of(record))}, {"body", encode_body(record)}};
}

Record decode_body(Kind kind, const Json& body) {
    switch (kind) {
        case Kind::Model: return decode_model(body);
        case Kind::Dataset: return decode_dataset(body);
        case Kind::Instance: return decode_instance(body);
        case Kind::Prediction: return decode_prediction(body);
        case Kind::Concept: return decode_concept(body);
        case Kind::Hardware: return decode_hardware(body);
        case Kind::Evaluation: return decode_run(body);
        case Kind::RawCard: return decode_raw_card(body);
    }
    throw DecodeError("kind", "unhandled kind");
}

Record decode_envelope(const Json& envelope) {
    if (!envelope.is_object()) throw DecodeError("<root>", "expected envelope object");
    auto kind_it = envelope.find("kind");
    if (kind_it == envelope.end() || !kind_it->is_string()) {
        throw DecodeError("kind", "missing or non-string kind");
    }
    auto kind = parse_kind(kind_it->get<std::string>());
    if (!kind) throw DecodeError("kind", "unknown kind '" + kind_it->get<std::string>() + "'");
    auto body_it = envelope.find("body");
    if (body_it == envelope.end()) throw DecodeError("body", "missing body");
    return decode_body(*kind, *body_it);
}

Record decode_envelope(std::string_view text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DecodeError("<root>", "malformed JSON");
    return decode_envelope(j);
}

std::string canonical_bytes_unchecked(const Record& record) {
    return encode_envelope(record).dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string canonical_bytes(const Record& record) {
    auto report = validate(record);
    if (!report.ok()) throw ValidationError(std::move(report));
    return canonical_bytes_unchecked(record);
}

}  // namespace mz
