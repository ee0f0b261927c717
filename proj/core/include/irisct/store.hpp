#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irisct/features.hpp"

namespace irisct {

/// One enrolled template keyed by subject and sample. Serialized as a single
/// tab-separated line with six fields: subject, sample, method tag, entry
/// count, payload hex, mask hex (or "-" when no mask is tracked).
///
/// Payload layout: code entries first, packed two bits each (00 zero,
/// 01 plus one, 10 minus one, low bit pairs first); then real entries as
/// little-endian 8-byte doubles. Sparse-code templates append their
/// positions as little-endian 4-byte signed integers. The split between
/// codes and reals is a function of the method tag and the count field, so
/// the line carries no redundant sizes. Pad bits are zero and hex is
/// lowercase; any accepted line re-encodes to the identical bytes.
struct TemplateRecord {
    std::string subject_id;
    std::string sample_id;
    FeatureVector features;
};

/// Serializes one record to its line (no trailing newline).
/// Throws Error{BadRecord} when the ids contain separators or the feature
/// vector's shape does not match its method.
std::string encode_record(const TemplateRecord& rec);

/// Parses one line. Throws Error{BadRecord} on any malformed field.
TemplateRecord decode_record(std::string_view line);

/// Appends records to the store file, one line each, creating the file when
/// missing. Existing content is never touched.
void append_records(const std::string& path, std::span<const TemplateRecord> recs);

/// Reads every record in append order. Throws Error{FileNotFound} when the
/// file cannot be opened and Error{BadRecord} (with the line number) on the
/// first malformed line.
std::vector<TemplateRecord> read_records(const std::string& path);

} // namespace irisct
