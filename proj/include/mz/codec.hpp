#pragma once
// Canonical document encoding for meta-model records.
//
// Envelope: {"body": <record>, "kind": <type name>}. Keys are sorted, output
// is compact, numbers use shortest round-trip form, timestamps are RFC 3339
// UTC, absent optionals are omitted.

#include "mz/metamodel.hpp"

#include <string>
#include <string_view>

namespace mz {

Json encode_body(const Record& record);
Json encode_envelope(const Record& record);

// Throws DecodeError naming the offending field path.
Record decode_body(Kind kind, const Json& body);
Record decode_envelope(const Json& envelope);
Record decode_envelope(std::string_view text);
// Text overloads; a bare string would otherwise also convert to Json.
inline Record decode_envelope(const std::string& text) { return decode_envelope(std::string_view(text)); }
inline Record decode_envelope(const char* text) { return decode_envelope(std::string_view(text)); }

// Rejects records failing record-local validation (ValidationError).
std::string canonical_bytes(const Record& record);

// Same encoding without the validation gate; used where the caller has
// already validated.
std::string canonical_bytes_unchecked(const Record& record);

Json encode(const MetricValue& m);
MetricValue decode_metric(const Json& j, const std::string& path);

}  // namespace mz
