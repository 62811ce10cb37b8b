#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtwtt/timebase.hpp"

namespace qtwtt {

/// One record of the tag file format: detector channel plus the two-part
/// timestamp. Binary layout is little-endian (u8, i64, u64), 17 bytes per
/// record, no padding, no header. The CSV variant is
/// `channel,seconds,frac_fs` with a one-line header.
struct TagRecord {
    std::uint8_t channel{0};
    TimeTag tag;

    bool operator==(const TagRecord&) const = default;
};

void write_tags_binary(std::ostream& os, const std::vector<TagRecord>& records);
std::vector<TagRecord> read_tags_binary(std::istream& is);

void write_tags_csv(std::ostream& os, const std::vector<TagRecord>& records);
std::vector<TagRecord> read_tags_csv(std::istream& is);

void write_tags_binary_file(const std::string& path, const std::vector<TagRecord>& records);
std::vector<TagRecord> read_tags_binary_file(const std::string& path);
void write_tags_csv_file(const std::string& path, const std::vector<TagRecord>& records);
std::vector<TagRecord> read_tags_csv_file(const std::string& path);

} // namespace qtwtt
