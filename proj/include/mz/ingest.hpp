#pragma once
// The three acquisition paths: manual records, model-zoo cards, and an
// evaluation harness.

#include "mz/store.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mz {

class IngestError : public Error {
public:
    using Error::Error;
};

// Stamps manual provenance, validates against the store and puts. Throws
// ValidationError or ConflictError.
PutResult ingest_manual(Store& store, Record record);

// Envelope file: one envelope object or an array of them.
std::vector<Record> read_envelopes(const std::filesystem::path& file);

// ---------------------------------------------------------------------------
// Model zoos
// ---------------------------------------------------------------------------

// Recorded card as it came from the zoo: {identifier, fields{...}, body_text}.
struct RawCard {
    std::string identifier;
    Json fields = Json::object();
    std::string body_text;
};

// Throws DecodeError when the identifier is missing or the shape is wrong.
RawCard parse_card(const Json& j);
Json to_json(const RawCard& card);

struct MappingReport {
    std::string identifier;
    std::vector<std::string> mapped;
    std::vector<std::string> unmapped;
    std::vector<std::string> notes;
    ValidationReport validation;
};

Json to_json(const MappingReport& report);

// Everything one card maps to, in put order.
struct MappedCard {
    RawCardRecord raw;
    std::vector<HardwareProfile> hardware;
    std::vector<DatasetRecord> datasets;
    ModelRecord model;
    std::vector<EvaluationRun> runs;
    MappingReport report;

    [[nodiscard]] std::vector<Record> records() const;
};

// One file of a recorded zoo: a parsed card or the reason it is unusable.
struct CardFile {
    std::string file;
    std::optional<RawCard> card;
    std::string error;
};

class ZooAdapter {
public:
    virtual ~ZooAdapter() = default;
    [[nodiscard]] virtual std::string zoo_name() const = 0;
    // Read-only listing of a recorded source, sorted by file name.
    virtual std::vector<CardFile> list_models(const std::filesystem::path& source) const = 0;
    virtual RawCard fetch_card(const std::filesystem::path& source, std::string_view identifier) const = 0;
    // Deterministic given the card and the datasets visible in `store`.
    virtual MappedCard map_card(const RawCard& card, const StoreView& store) const = 0;
};

// Hugging Face style cards. Field mapping:
//   pipeline_tag    -> task (open vocabulary; non-curated labels are noted)
//   datasets        -> trained_on; entries are names or {name, version}; a
//                      missing or "unknown" version is "0.0". Datasets not in
//                      the store become stubs with collection_method unknown.
//   metrics         -> one EvaluationRun per entry {metric: value, ...,
//                      dataset?, slice?} on the "unspecified" hardware stub
//   model_type      -> architecture.family
//   parameter_count -> architecture.parameter_count
//   tags            -> tags; library_name -> tag "library:<name>"
//   sha | version   -> version, suffixed "+<zoo>"
//   last_modified   -> created_at and run executed_at
// Signatures come from a per-task table. Every other field is reported as
// unmapped; the verbatim card is stored as a RawCard record.
class HuggingFaceAdapter final : public ZooAdapter {
public:
    [[nodiscard]] std::string zoo_name() const override { return "huggingface"; }
    std::vector<CardFile> list_models(const std::filesystem::path& source) const override;
    RawCard fetch_card(const std::filesystem::path& source, std::string_view identifier) const override;
    MappedCard map_card(const RawCard& card, const StoreView& store) const override;
};

// Adapter by zoo name, or nullptr.
std::unique_ptr<ZooAdapter> make_adapter(std::string_view zoo);

struct Quarantined {
    std::string file;
    std::string identifier;
    std::string reason;
};

struct CrawlSummary {
    std::string zoo;
    std::size_t cards = 0;
    // Cards whose records are all in the store after the crawl.
    std::size_t stored = 0;
    // Records appended by this crawl; zero on a repeated crawl.
    std::size_t new_records = 0;
    std::vector<MappingReport> reports;
    std::vector<Quarantined> quarantined;
};

Json to_json(const CrawlSummary& summary);

// Throws IngestError when `fixture_dir` is not a readable directory.
CrawlSummary crawl(Store& store, const ZooAdapter& adapter, const std::filesystem::path& fixture_dir);

struct AuditMismatch {
    std::string raw_card_id;
    std::string record_id;
    std::string problem;
};

// Re-maps every stored RawCard of the adapter's zoo and compares the result
// with the stored records byte for byte.
std::vector<AuditMismatch> audit(const Store& store, const ZooAdapter& adapter);

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

class ExecutorError : public Error {
public:
    using Error::Error;
};

class Executor {
public:
    virtual ~Executor() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    // Deterministic for fixed inputs and seed.
    virtual std::vector<MetricValue> run(const ModelRecord& model, const DatasetRecord& dataset,
                                         const HardwareProfile& hardware, std::uint64_t seed) = 0;
};

// Replays a manifest [{model, dataset, hardware, metrics{name: value}}]. The
// first three match a record id or name. A metric value is a number (polarity
// from the curated list) or {value, higher_is_better?, unit?, slice?}.
class SimulatedExecutor final : public Executor {
public:
    explicit SimulatedExecutor(Json manifest);
    static SimulatedExecutor from_file(const std::filesystem::path& manifest);

    [[nodiscard]] std::string name() const override { return "simulated"; }
    std::vector<MetricValue> run(const ModelRecord& model, const DatasetRecord& dataset,
                                 const HardwareProfile& hardware, std::uint64_t seed) override;

private:
    Json manifest_;
};

using Clock = std::function<Timestamp()>;

// Resolves the refs (id, or name at its latest version), runs the executor
// and stores one new EvaluationRun. Throws IngestError for unresolved refs,
// ExecutorError for executor failures and ValidationError for bad metrics.
RecordKey run_evaluation(Store& store, Executor& executor, std::string_view model,
                         std::string_view dataset, std::string_view hardware, std::uint64_t seed,
                         const Clock& clock = Timestamp::now);

}  // namespace mz
