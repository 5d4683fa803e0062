#pragma once
// Meta-model record types.
//
// Configuration package: ModelRecord (+ IOSpec, TransformStep, Architecture,
//   Hyperparameter)
// Dataset package:       DatasetRecord, DataInstance
// Execution package:     PredictionRecord, SemanticConcept
// Evaluation package:    HardwareProfile, EvaluationRun (+ MetricValue)
//
// RawCardRecord keeps the verbatim payload of an externally crawled model card
// so the mapped records stay auditable.

#include "mz/timestamp.hpp"

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mz {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Closed vocabularies
// ---------------------------------------------------------------------------

enum class DType { Float32, Int64, String, Bytes, Bool };
enum class ValueType { Int, Float, String, Bool, Enum };
enum class CollectionMethod { Crowdsourced, Scraped, Synthetic, Curated, Derived, Unknown };
enum class Modality { Image, Text, Audio, Tabular, Multimodal };
enum class Split { Train, Validation, Test, Unsplit };
enum class DeviceClass { Cloud, Workstation, Edge, Mobile, Unspecified };
enum class Origin { Manual, ExternalZoo, EvaluationHarness };

std::string_view to_string(DType v);
std::string_view to_string(ValueType v);
std::string_view to_string(CollectionMethod v);
std::string_view to_string(Modality v);
std::string_view to_string(Split v);
std::string_view to_string(DeviceClass v);
std::string_view to_string(Origin v);

// Each returns nullopt for a string outside the vocabulary.
std::optional<DType> parse_dtype(std::string_view s);
std::optional<ValueType> parse_value_type(std::string_view s);
std::optional<CollectionMethod> parse_collection_method(std::string_view s);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<Split> parse_split(std::string_view s);
std::optional<DeviceClass> parse_device_class(std::string_view s);
std::optional<Origin> parse_origin(std::string_view s);

// ---------------------------------------------------------------------------
// Shared value types
// ---------------------------------------------------------------------------

// A shape dimension; nullopt is the wildcard "*".
using Dim = std::optional<std::int64_t>;

struct IOSpec {
    std::string name;
    DType dtype = DType::Float32;
    std::vector<Dim> shape;
    std::optional<std::string> semantic_type;

    friend bool operator==(const IOSpec&, const IOSpec&) = default;
};

struct TransformStep {
    std::string name;
    Json parameters = Json::object();

    friend bool operator==(const TransformStep&, const TransformStep&) = default;
};

struct Architecture {
    std::string family;
    std::int64_t parameter_count = 0;
    std::optional<std::string> description;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct Hyperparameter {
    std::string name;
    ValueType value_type = ValueType::String;
    Json value;

    friend bool operator==(const Hyperparameter&, const Hyperparameter&) = default;
};

struct DatasetRef {
    std::string id;
    std::string version;

    friend bool operator==(const DatasetRef&, const DatasetRef&) = default;
};

struct Provenance {
    Origin origin = Origin::Manual;
    std::optional<std::string> source_name;
    std::optional<std::string> source_url;
    std::optional<Timestamp> retrieved_at;
    // Id of the RawCardRecord this record was mapped from, if any.
    std::optional<std::string> attachment;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct MetricValue {
    std::string name;
    double value = 0.0;
    std::optional<std::string> unit;
    std::optional<std::string> slice;
    bool higher_is_better = true;

    friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

struct ConceptScore {
    std::string concept_iri;
    double score = 0.0;

    friend bool operator==(const ConceptScore&, const ConceptScore&) = default;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct ModelRecord {
    std::string id;
    std::string name;
    std::string version;
    std::string task;
    std::vector<IOSpec> input_signature;
    std::vector<IOSpec> output_signature;
    std::vector<TransformStep> transformations;
    Architecture architecture;
    std::vector<Hyperparameter> hyperparameters;
    std::vector<DatasetRef> trained_on;
    Provenance source;
    std::set<std::string> tags;
    Timestamp created_at;

    friend bool operator==(const ModelRecord&, const ModelRecord&) = default;
};

struct DatasetRecord {
    std::string id;
    std::string name;
    std::string version;
    std::vector<std::string> source;
    CollectionMethod collection_method = CollectionMethod::Unknown;
    std::optional<std::int64_t> annotator_count;
    std::optional<std::string> license;
    bool contains_sensitive_data = false;
    Modality modality = Modality::Multimodal;
    std::int64_t instance_count = 0;
    Provenance provenance;

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct DataInstance {
    std::string id;
    DatasetRef dataset_id;
    std::string locator;
    // SemanticConcept IRIs.
    std::vector<std::string> labels;
    Split split = Split::Unsplit;
    bool sensitive = false;
    Provenance provenance;

    friend bool operator==(const DataInstance&, const DataInstance&) = default;
};

struct PredictionRecord {
    std::string id;
    std::string model_id;
    std::string instance_id;
    std::vector<ConceptScore> predicted;
    std::optional<bool> correct;
    Provenance provenance;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct SemanticConcept {
    std::string iri;
    std::string label;
    std::string kb_source;
    Provenance provenance;

    friend bool operator==(const SemanticConcept&, const SemanticConcept&) = default;
};

struct HardwareProfile {
    std::string id;
    std::string name;
    DeviceClass device_class = DeviceClass::Cloud;
    std::string cpu;
    std::optional<std::string> accelerator;
    // Required unless device_class is Unspecified.
    std::optional<std::int64_t> memory_mb;
    Provenance provenance;

    friend bool operator==(const HardwareProfile&, const HardwareProfile&) = default;
};

struct EvaluationRun {
    std::string id;
    std::string model_id;
    DatasetRef dataset_id;
    std::string hardware_id;
    std::vector<MetricValue> metrics;
    Timestamp executed_at;
    Provenance executor;

    friend bool operator==(const EvaluationRun&, const EvaluationRun&) = default;
};

struct RawCardRecord {
    std::string id;
    std::string zoo;
    std::string identifier;
    Json fields = Json::object();
    std::string body_text;
    Provenance provenance;

    friend bool operator==(const RawCardRecord&, const RawCardRecord&) = default;
};

// Alternative order matches Kind.
using Record = std::variant<ModelRecord, DatasetRecord, DataInstance, PredictionRecord,
                            SemanticConcept, HardwareProfile, EvaluationRun, RawCardRecord>;

enum class Kind : std::uint8_t {
    Model,
    Dataset,
    Instance,
    Prediction,
    Concept,
    Hardware,
    Evaluation,
    RawCard,
};

inline constexpr std::size_t kKindCount = std::variant_size_v<Record>;
inline constexpr Kind kAllKinds[] = {Kind::Model,    Kind::Dataset,    Kind::Instance,
                                     Kind::Prediction, Kind::Concept,  Kind::Hardware,
                                     Kind::Evaluation, Kind::RawCard};

// Envelope type names: "ModelRecord", "DatasetRecord", ...
std::string_view kind_name(Kind k);
std::optional<Kind> parse_kind(std::string_view name);

Kind kind_of(const Record& r);
const std::string& id_of(const Record& r);
// Versioned identity. Unversioned kinds use their natural name (hardware name,
// concept IRI, otherwise id) and an empty version.
std::string name_of(const Record& r);
std::string version_of(const Record& r);
const Provenance& provenance_of(const Record& r);
Provenance& provenance_of(Record& r);

// ---------------------------------------------------------------------------
// Versions and metrics
// ---------------------------------------------------------------------------

// Dotted numeric tuples when every segment of both sides is numeric,
// otherwise byte-wise lexicographic. Numerically equal spellings ("1.0" vs
// "1.00") fall back to lexicographic so the order stays total.
std::strong_ordering compare_versions(std::string_view a, std::string_view b);

// Polarity for curated metric names; nullopt for names outside the seed list.
std::optional<bool> known_metric_polarity(std::string_view name);

// Curated task labels. Other labels are accepted.
bool is_curated_task(std::string_view task);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
    std::string path;
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] std::string to_string() const;
};

// Reference-resolution context used by validate().
class Resolver {
public:
    virtual ~Resolver() = default;
    virtual const Record* find(Kind kind, std::string_view id) const = 0;
};

// Record-local invariants only.
ValidationReport validate(const Record& record);
// Local invariants plus reference resolution through `resolver`.
ValidationReport validate(const Record& record, const Resolver& resolver);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    explicit ValidationError(ValidationReport report)
        : Error("validation failed: " + report.to_string()), report_(std::move(report)) {}
    [[nodiscard]] const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

// Structurally unparseable envelope or body.
class DecodeError : public Error {
public:
    DecodeError(std::string path, std::string reason)
        : Error(path + ": " + reason), path_(std::move(path)), reason_(std::move(reason)) {}
    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] const std::string& reason() const { return reason_; }

private:
    std::string path_;
    std::string reason_;
};

}  // namespace mz
