#pragma once
// Append-only metadata log.
//
// On-disk layout: a directory holding "metadata.log". Each line is
//
//     <crc32c, 8 lowercase hex digits> <canonical JSON envelope>\n
//
// The checksum covers the envelope bytes only. A trailing line that is
// incomplete or fails its checksum is a torn write and is ignored on open;
// the same failure on any earlier line is corruption.
//
// Secondary indexes live in memory and are rebuilt on open.

#include "mz/metamodel.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace mz {

struct RecordKey {
    Kind kind = Kind::Model;
    std::string id;

    friend auto operator<=>(const RecordKey&, const RecordKey&) = default;
};

std::string to_string(const RecordKey& key);

enum class IndexedField { Name, Task, DatasetId, ModelId };

struct ScanFilter {
    IndexedField field;
    std::string value;
};

struct StoredEntry {
    std::uint64_t offset = 0;
    // Line length including the trailing newline.
    std::uint64_t length = 0;
    Record record;
    std::string canonical;
};

struct PutResult {
    RecordKey key;
    // False when an identical record was already present.
    bool created = false;
};

struct IntegrityIssue {
    std::string where;
    std::string problem;
};

struct IntegrityReport {
    std::vector<IntegrityIssue> issues;
    [[nodiscard]] bool ok() const { return issues.empty(); }
};

class StoreError : public Error {
public:
    using Error::Error;
};

// Same (kind, id) or (kind, name, version) already stored with different bytes.
class ConflictError : public StoreError {
public:
    explicit ConflictError(RecordKey existing, const std::string& what)
        : StoreError(what), existing_(std::move(existing)) {}
    [[nodiscard]] const RecordKey& existing() const { return existing_; }

private:
    RecordKey existing_;
};

class CorruptionError : public StoreError {
public:
    CorruptionError(std::uint64_t offset, std::size_t entry_index, const std::string& why)
        : StoreError("corrupt entry " + std::to_string(entry_index) + " at offset " +
                     std::to_string(offset) + ": " + why),
          offset_(offset),
          entry_index_(entry_index) {}
    [[nodiscard]] std::uint64_t offset() const { return offset_; }
    // 1-based position of the entry in the log.
    [[nodiscard]] std::size_t entry_index() const { return entry_index_; }

private:
    std::uint64_t offset_;
    std::size_t entry_index_;
};

class UnknownKindError : public StoreError {
public:
    using StoreError::StoreError;
};

class NotFoundError : public StoreError {
public:
    using StoreError::StoreError;
};

std::uint32_t crc32c(std::string_view bytes);

namespace detail {
struct StoreState;
}

// Read access to a consistent state of the store. Holds a shared lock for its
// lifetime; do not call Store::put on the same thread while one is alive.
class StoreView final : public Resolver {
public:
    StoreView(std::shared_lock<std::shared_mutex> lock, const detail::StoreState& state);
    StoreView(StoreView&&) noexcept = default;

    const Record* get(const RecordKey& key) const;
    const Record* get(Kind kind, std::string_view name, std::string_view version) const;
    // Maximal version under compare_versions.
    const Record* latest(Kind kind, std::string_view name) const;
    // Insertion order, each record at most once.
    std::vector<const Record*> scan(Kind kind, const std::optional<ScanFilter>& filter = {}) const;
    std::vector<const Record*> scan(std::string_view kind,
                                    const std::optional<ScanFilter>& filter = {}) const;

    const Record* find(Kind kind, std::string_view id) const override;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t count(Kind kind) const;
    [[nodiscard]] const std::vector<StoredEntry>& entries() const;
    // Position of a record in insertion order, if stored.
    [[nodiscard]] std::optional<std::size_t> position(const RecordKey& key) const;

private:
    std::shared_lock<std::shared_mutex> lock_;
    const detail::StoreState* state_;
};

class Store {
public:
    // `path` is a store directory (created if missing) or an existing log file.
    static Store open(const std::filesystem::path& path);

    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    ~Store();

    // Validates against current contents, then appends. Identical canonical
    // bytes are idempotent. Throws ValidationError or ConflictError.
    PutResult put(const Record& record);

    std::optional<Record> get(const RecordKey& key) const;
    std::optional<Record> latest(Kind kind, std::string_view name) const;
    std::vector<Record> scan(Kind kind, const std::optional<ScanFilter>& filter = {}) const;

    [[nodiscard]] StoreView view() const;

    // Picks up entries appended by another writer since open.
    void refresh();

    [[nodiscard]] IntegrityReport integrity_check() const;

    [[nodiscard]] const std::filesystem::path& log_path() const;
    [[nodiscard]] std::vector<std::string> warnings() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::map<Kind, std::size_t> counts() const;

private:
    struct Impl;
    explicit Store(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

inline constexpr const char* kLogFileName = "metadata.log";

}  // namespace mz
