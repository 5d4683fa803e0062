#include "mz/store.hpp"

#include "mz/codec.hpp"

#include <boost/crc.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <sys/stat.h>
#include <unistd.h>

namespace mz {

std::string to_string(const RecordKey& key) {
    return std::string(kind_name(key.kind)) + "/" + key.id;
}

std::uint32_t crc32c(std::string_view bytes) {
    boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

namespace detail {

struct StoreState {
    std::vector<StoredEntry> entries;
    std::map<RecordKey, std::size_t> by_id;
    std::map<std::tuple<Kind, std::string, std::string>, std::size_t> by_name_version;
    std::array<std::vector<std::size_t>, kKindCount> by_kind;
    std::map<std::pair<Kind, std::string>, std::vector<std::size_t>> by_name;
    std::map<std::string, std::vector<std::size_t>> by_task;
    std::map<std::string, std::vector<std::size_t>> by_dataset;
    std::map<std::string, std::vector<std::size_t>> by_model;

    const Record* find(Kind kind, std::string_view id) const {
        auto it = by_id.find(RecordKey{kind, std::string(id)});
        return it == by_id.end() ? nullptr : &entries[it->second].record;
    }

    void index(std::size_t pos) {
        const Record& rec = entries[pos].record;
        Kind kind = kind_of(rec);
        by_id.emplace(RecordKey{kind, id_of(rec)}, pos);
        by_name_version.emplace(std::make_tuple(kind, name_of(rec), version_of(rec)), pos);
        by_kind[static_cast<std::size_t>(kind)].push_back(pos);
        by_name[{kind, name_of(rec)}].push_back(pos);

        std::set<std::string> datasets;
        std::set<std::string> models;
        if (const auto* m = std::get_if<ModelRecord>(&rec)) {
            by_task[m->task].push_back(pos);
            for (const auto& ref : m->trained_on) datasets.insert(ref.id);
        } else if (const auto* d = std::get_if<DataInstance>(&rec)) {
            datasets.insert(d->dataset_id.id);
        } else if (const auto* r = std::get_if<EvaluationRun>(&rec)) {
            datasets.insert(r->dataset_id.id);
            models.insert(r->model_id);
        } else if (const auto* p = std::get_if<PredictionRecord>(&rec)) {
            models.insert(p->model_id);
        }
        for (const auto& id : datasets) by_dataset[id].push_back(pos);
        for (const auto& id : models) by_model[id].push_back(pos);
    }

    void rebuild() {
        by_id.clear();
        by_name_version.clear();
        for (auto& v : by_kind) v.clear();
        by_name.clear();
        by_task.clear();
        by_dataset.clear();
        by_model.clear();
        for (std::size_t i = 0; i < entries.size(); ++i) index(i);
    }

    friend bool operator==(const StoreState& a, const StoreState& b) {
        return a.by_id == b.by_id && a.by_name_version == b.by_name_version &&
               a.by_kind == b.by_kind && a.by_name == b.by_name && a.by_task == b.by_task &&
               a.by_dataset == b.by_dataset && a.by_model == b.by_model;
    }
};

}  // namespace detail

namespace {

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Fd& operator=(Fd&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    ~Fd() { reset(); }

    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    [[nodiscard]] int get() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }

private:
    int fd_ = -1;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_crc(std::uint32_t crc) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", crc);
    return buf;
}

// Parses one line body (without newline). Returns the record or an error
// description.
std::variant<Record, std::string> parse_line(std::string_view line) {
    if (line.size() < 10 || line[8] != ' ') return std::string("malformed line header");
    std::uint32_t stored = 0;
    auto hex = line.substr(0, 8);
    for (char c : hex) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
            return std::string("malformed checksum");
        }
    }
    std::from_chars(hex.data(), hex.data() + hex.size(), stored, 16);
    auto body = line.substr(9);
    if (crc32c(body) != stored) return std::string("checksum mismatch");
    try {
        Record rec = decode_envelope(body);
        if (canonical_bytes_unchecked(rec) != body) return std::string("non-canonical envelope");
        return rec;
    } catch (const std::exception& e) {
        return std::string("undecodable envelope: ") + e.what();
    }
}

struct ScanOutcome {
    std::vector<StoredEntry> entries;
    std::uint64_t valid_end = 0;
    std::optional<std::string> torn;
};

// Scans `data` starting at byte `start`; entry numbering continues from
// `first_index`.
ScanOutcome scan_log(std::string_view data, std::uint64_t start, std::size_t first_index) {
    ScanOutcome out;
    out.valid_end = start;
    std::uint64_t pos = start;
    std::size_t index = first_index;
    while (pos < data.size()) {
        ++index;
        auto nl = data.find('\n', pos);
        if (nl == std::string_view::npos) {
            out.torn = "incomplete trailing entry " + std::to_string(index) + " at offset " +
                       std::to_string(pos) + " (" + std::to_string(data.size() - pos) + " bytes)";
            break;
        }
        auto line = data.substr(pos, nl - pos);
        auto parsed = parse_line(line);
        bool last = nl + 1 == data.size();
        if (auto* err = std::get_if<std::string>(&parsed)) {
            if (last) {
                out.torn = "damaged trailing entry " + std::to_string(index) + " at offset " +
                           std::to_string(pos) + ": " + *err;
                break;
            }
            throw CorruptionError(pos, index, *err);
        }
        out.entries.push_back(StoredEntry{pos, nl + 1 - pos, std::move(std::get<Record>(parsed)),
                                          std::string(line.substr(9))});
        pos = nl + 1;
        out.valid_end = pos;
    }
    return out;
}

}  // namespace

struct Store::Impl {
    std::filesystem::path log_path;
    mutable std::shared_mutex mutex;
    detail::StoreState state;
    std::uint64_t valid_end = 0;
    std::uint64_t file_size = 0;
    std::vector<std::string> warnings;
    Fd append_fd;

    void load_from(std::uint64_t start) {
        std::string data = read_file(log_path);
        if (data.size() < start) {
            throw StoreError("log file shrank below its last valid entry: " + log_path.string());
        }
        auto outcome = scan_log(data, start, state.entries.size());
        // Reject duplicates among loaded entries before publishing them.
        for (auto& entry : outcome.entries) {
            Kind kind = kind_of(entry.record);
            RecordKey key{kind, id_of(entry.record)};
            auto nv = std::make_tuple(kind, name_of(entry.record), version_of(entry.record));
            if (state.by_id.count(key) || state.by_name_version.count(nv)) {
                throw CorruptionError(entry.offset, state.entries.size() + 1,
                                      "duplicate record " + to_string(key));
            }
            state.entries.push_back(std::move(entry));
            state.index(state.entries.size() - 1);
        }
        valid_end = outcome.valid_end;
        file_size = data.size();
        if (outcome.torn) {
            std::string msg = log_path.string() + ": ignoring " + *outcome.torn;
            spdlog::warn("{}", msg);
            warnings.push_back(std::move(msg));
        }
    }

    void ensure_writable() {
        if (!append_fd) {
            int fd = ::open(log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
            if (fd < 0) {
                throw StoreError("cannot open " + log_path.string() + " for append: " +
                                 std::strerror(errno));
            }
            append_fd = Fd(fd);
        }
        if (file_size > valid_end) {
            // Drop the torn tail so new entries start on a line boundary.
            if (::ftruncate(append_fd.get(), static_cast<off_t>(valid_end)) != 0) {
                throw StoreError("cannot truncate torn tail: " + std::string(std::strerror(errno)));
            }
            file_size = valid_end;
        }
    }

    void append(const std::string& line) {
        ensure_writable();
        std::size_t written = 0;
        while (written < line.size()) {
            ssize_t n = ::write(append_fd.get(), line.data() + written, line.size() - written);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw StoreError("write failed: " + std::string(std::strerror(errno)));
            }
            written += static_cast<std::size_t>(n);
        }
        if (::fdatasync(append_fd.get()) != 0) {
            throw StoreError("fdatasync failed: " + std::string(std::strerror(errno)));
        }
    }
};

Store::Store(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

Store Store::open(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    auto impl = std::make_unique<Impl>();
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) {
        impl->log_path = path;
    } else {
        if (!fs::exists(path, ec)) {
            fs::create_directories(path, ec);
            if (ec) throw StoreError("cannot create store directory " + path.string() + ": " + ec.message());
        } else if (!fs::is_directory(path, ec)) {
            throw StoreError("not a directory or log file: " + path.string());
        }
        impl->log_path = path / kLogFileName;
        if (!fs::exists(impl->log_path, ec)) {
            std::ofstream create(impl->log_path, std::ios::binary);
            if (!create) throw StoreError("cannot create " + impl->log_path.string());
        }
    }
    impl->load_from(0);
    return Store(std::move(impl));
}

PutResult Store::put(const Record& record) {
    std::unique_lock lock(impl_->mutex);
    auto& state = impl_->state;

    struct StateResolver final : Resolver {
        const detail::StoreState& s;
        explicit StateResolver(const detail::StoreState& st) : s(st) {}
        const Record* find(Kind kind, std::string_view id) const override { return s.find(kind, id); }
    } resolver(state);

    auto report = validate(record, resolver);
    if (!report.ok()) throw ValidationError(std::move(report));

    std::string canonical = canonical_bytes_unchecked(record);
    Kind kind = kind_of(record);
    RecordKey key{kind, id_of(record)};

    if (auto it = state.by_id.find(key); it != state.by_id.end()) {
        if (state.entries[it->second].canonical == canonical) return {key, false};
        throw ConflictError(key, "version conflict: " + to_string(key) +
                                     " already stored with different content");
    }
    auto nv = std::make_tuple(kind, name_of(record), version_of(record));
    if (auto it = state.by_name_version.find(nv); it != state.by_name_version.end()) {
        const auto& existing = state.entries[it->second];
        RecordKey existing_key{kind, id_of(existing.record)};
        throw ConflictError(existing_key,
                            "version conflict: " + std::string(kind_name(kind)) + " '" +
                                std::get<1>(nv) + "' version '" + std::get<2>(nv) +
                                "' already stored as " + existing_key.id);
    }

    std::string line = format_crc(crc32c(canonical)) + " " + canonical + "\n";
    std::uint64_t offset = impl_->valid_end;
    impl_->append(line);
    impl_->valid_end += line.size();
    impl_->file_size = impl_->valid_end;

    state.entries.push_back(StoredEntry{offset, line.size(), record, std::move(canonical)});
    state.index(state.entries.size() - 1);
    return {key, true};
}

StoreView Store::view() const {
    return StoreView(std::shared_lock(impl_->mutex), impl_->state);
}

std::optional<Record> Store::get(const RecordKey& key) const {
    auto v = view();
    if (const Record* r = v.get(key)) return *r;
    return std::nullopt;
}

std::optional<Record> Store::latest(Kind kind, std::string_view name) const {
    auto v = view();
    if (const Record* r = v.latest(kind, name)) return *r;
    return std::nullopt;
}

std::vector<Record> Store::scan(Kind kind, const std::optional<ScanFilter>& filter) const {
    auto v = view();
    std::vector<Record> out;
    for (const Record* r : v.scan(kind, filter)) out.push_back(*r);
    return out;
}

void Store::refresh() {
    std::unique_lock lock(impl_->mutex);
    impl_->load_from(impl_->valid_end);
}

const std::filesystem::path& Store::log_path() const { return impl_->log_path; }

std::vector<std::string> Store::warnings() const {
    std::shared_lock lock(impl_->mutex);
    return impl_->warnings;
}

std::size_t Store::size() const { return view().size(); }

std::map<Kind, std::size_t> Store::counts() const {
    auto v = view();
    std::map<Kind, std::size_t> out;
    for (Kind k : kAllKinds) out[k] = v.count(k);
    return out;
}

IntegrityReport Store::integrity_check() const {
    IntegrityReport report;
    auto v = view();  // holds the shared lock for the whole check
    const auto& state = impl_->state;

    // Checksums: re-read the file and compare every entry byte for byte.
    std::string data;
    try {
        data = read_file(impl_->log_path);
    } catch (const std::exception& e) {
        report.issues.push_back({impl_->log_path.string(), e.what()});
        return report;
    }
    for (std::size_t i = 0; i < state.entries.size(); ++i) {
        const auto& entry = state.entries[i];
        std::string where = "entry " + std::to_string(i + 1) + " @" + std::to_string(entry.offset);
        if (entry.offset + entry.length > data.size()) {
            report.issues.push_back({where, "entry extends past end of file"});
            continue;
        }
        std::string_view line(data.data() + entry.offset, entry.length - 1);
        auto parsed = parse_line(line);
        if (auto* err = std::get_if<std::string>(&parsed)) {
            report.issues.push_back({where, *err});
        } else if (line.substr(9) != entry.canonical) {
            report.issues.push_back({where, "on-disk bytes differ from loaded entry"});
        }
    }
    if (data.size() > impl_->valid_end) {
        report.issues.push_back({"tail @" + std::to_string(impl_->valid_end),
                                 std::to_string(data.size() - impl_->valid_end) +
                                     " bytes beyond the last complete entry"});
    }

    // Index consistency against a fresh rebuild.
    detail::StoreState rebuilt;
    rebuilt.entries = state.entries;
    rebuilt.rebuild();
    if (!(rebuilt == state)) report.issues.push_back({"indexes", "secondary indexes out of sync"});

    // Reference closure and record invariants.
    std::map<std::string, std::int64_t> materialized;
    for (const auto& entry : state.entries) {
        auto vr = validate(entry.record, v);
        for (const auto& violation : vr.violations) {
            report.issues.push_back({to_string(RecordKey{kind_of(entry.record), id_of(entry.record)}) +
                                         ":" + violation.path,
                                     violation.reason});
        }
        if (const auto* inst = std::get_if<DataInstance>(&entry.record)) {
            ++materialized[inst->dataset_id.id];
        }
    }
    for (const auto& [dataset_id, n] : materialized) {
        if (const auto* d = v.find(Kind::Dataset, dataset_id)) {
            const auto& ds = std::get<DatasetRecord>(*d);
            if (ds.instance_count != n) {
                report.issues.push_back({"DatasetRecord/" + dataset_id + ":instance_count",
                                         "declares " + std::to_string(ds.instance_count) +
                                             " instances, " + std::to_string(n) + " stored"});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// StoreView
// ---------------------------------------------------------------------------

StoreView::StoreView(std::shared_lock<std::shared_mutex> lock, const detail::StoreState& state)
    : lock_(std::move(lock)), state_(&state) {}

const Record* StoreView::get(const RecordKey& key) const { return state_->find(key.kind, key.id); }

const Record* StoreView::get(Kind kind, std::string_view name, std::string_view version) const {
    auto it = state_->by_name_version.find(
        std::make_tuple(kind, std::string(name), std::string(version)));
    return it == state_->by_name_version.end() ? nullptr : &state_->entries[it->second].record;
}

const Record* StoreView::latest(Kind kind, std::string_view name) const {
    auto it = state_->by_name.find({kind, std::string(name)});
    if (it == state_->by_name.end()) return nullptr;
    const Record* best = nullptr;
    for (std::size_t pos : it->second) {
        const Record* r = &state_->entries[pos].record;
        if (!best || compare_versions(version_of(*r), version_of(*best)) > 0) best = r;
    }
    return best;
}

std::vector<const Record*> StoreView::scan(Kind kind, const std::optional<ScanFilter>& filter) const {
    const std::vector<std::size_t>* positions = &state_->by_kind[static_cast<std::size_t>(kind)];
    static const std::vector<std::size_t> kNone;
    if (filter) {
        auto pick = [&](const auto& map, const std::string& key) {
            auto it = map.find(key);
            positions = it == map.end() ? &kNone : &it->second;
        };
        switch (filter->field) {
            case IndexedField::Name: {
                auto it = state_->by_name.find({kind, filter->value});
                positions = it == state_->by_name.end() ? &kNone : &it->second;
                break;
            }
            case IndexedField::Task: pick(state_->by_task, filter->value); break;
            case IndexedField::DatasetId: pick(state_->by_dataset, filter->value); break;
            case IndexedField::ModelId: pick(state_->by_model, filter->value); break;
        }
    }
    std::vector<const Record*> out;
    for (std::size_t pos : *positions) {
        const Record& r = state_->entries[pos].record;
        if (kind_of(r) == kind) out.push_back(&r);
    }
    return out;
}

std::vector<const Record*> StoreView::scan(std::string_view kind,
                                           const std::optional<ScanFilter>& filter) const {
    auto k = parse_kind(kind);
    if (!k) throw UnknownKindError("unknown record kind '" + std::string(kind) + "'");
    return scan(*k, filter);
}

const Record* StoreView::find(Kind kind, std::string_view id) const { return state_->find(kind, id); }

std::size_t StoreView::size() const { return state_->entries.size(); }

std::size_t StoreView::count(Kind kind) const {
    return state_->by_kind[static_cast<std::size_t>(kind)].size();
}

const std::vector<StoredEntry>& StoreView::entries() const { return state_->entries; }

std::optional<std::size_t> StoreView::position(const RecordKey& key) const {
    auto it = state_->by_id.find(key);
    if (it == state_->by_id.end()) return std::nullopt;
    return it->second;
}

}  // namespace mz
