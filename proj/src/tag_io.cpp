#include "qtwtt/tag_io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qtwtt {

namespace {

// Records are serialized little-endian regardless of host order.
void put_u64_le(std::array<char, 17>& buf, std::size_t off, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        buf[off + i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_u64_le(const std::array<char, 17>& buf, std::size_t off)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

} // namespace

void write_tags_binary(std::ostream& os, const std::vector<TagRecord>& records)
{
    std::array<char, 17> buf{};
    for (const auto& r : records) {
        buf[0] = static_cast<char>(r.channel);
        put_u64_le(buf, 1, static_cast<std::uint64_t>(r.tag.seconds));
        put_u64_le(buf, 9, static_cast<std::uint64_t>(r.tag.frac_fs));
        os.write(buf.data(), buf.size());
    }
    if (!os) throw std::runtime_error("tag write failed");
}

std::vector<TagRecord> read_tags_binary(std::istream& is)
{
    std::vector<TagRecord> out;
    std::array<char, 17> buf{};
    while (is.read(buf.data(), buf.size())) {
        TagRecord r;
        r.channel = static_cast<std::uint8_t>(buf[0]);
        r.tag.seconds = static_cast<std::int64_t>(get_u64_le(buf, 1));
        r.tag.frac_fs = static_cast<std::int64_t>(get_u64_le(buf, 9));
        if (!valid_tag(r.tag))
            throw std::runtime_error("tag file: frac_fs out of range");
        out.push_back(r);
    }
    if (is.gcount() != 0)
        throw std::runtime_error("tag file: truncated record");
    return out;
}

void write_tags_csv(std::ostream& os, const std::vector<TagRecord>& records)
{
    os << "channel,seconds,frac_fs\n";
    for (const auto& r : records)
        os << static_cast<int>(r.channel) << ',' << r.tag.seconds << ','
           << r.tag.frac_fs << '\n';
    if (!os) throw std::runtime_error("tag csv write failed");
}

std::vector<TagRecord> read_tags_csv(std::istream& is)
{
    std::vector<TagRecord> out;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("tag csv: missing header");
    if (line != "channel,seconds,frac_fs")
        throw std::runtime_error("tag csv: unexpected header '" + line + "'");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        TagRecord r;
        const char* p = line.data();
        const char* end = p + line.size();
        long ch = 0;
        auto rc = std::from_chars(p, end, ch);
        if (rc.ec != std::errc{} || *rc.ptr != ',')
            throw std::runtime_error("tag csv: bad channel in '" + line + "'");
        rc = std::from_chars(rc.ptr + 1, end, r.tag.seconds);
        if (rc.ec != std::errc{} || *rc.ptr != ',')
            throw std::runtime_error("tag csv: bad seconds in '" + line + "'");
        rc = std::from_chars(rc.ptr + 1, end, r.tag.frac_fs);
        if (rc.ec != std::errc{} || rc.ptr != end)
            throw std::runtime_error("tag csv: bad frac_fs in '" + line + "'");
        r.channel = static_cast<std::uint8_t>(ch);
        if (!valid_tag(r.tag))
            throw std::runtime_error("tag csv: frac_fs out of range");
        out.push_back(r);
    }
    return out;
}

namespace {

template <typename Fn>
auto with_ifstream(const std::string& path, Fn fn)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return fn(is);
}

template <typename Fn>
void with_ofstream(const std::string& path, Fn fn)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    fn(os);
}

} // namespace

void write_tags_binary_file(const std::string& path, const std::vector<TagRecord>& records)
{
    with_ofstream(path, [&](std::ostream& os) { write_tags_binary(os, records); });
}

std::vector<TagRecord> read_tags_binary_file(const std::string& path)
{
    return with_ifstream(path, [](std::istream& is) { return read_tags_binary(is); });
}

void write_tags_csv_file(const std::string& path, const std::vector<TagRecord>& records)
{
    with_ofstream(path, [&](std::ostream& os) { write_tags_csv(os, records); });
}

std::vector<TagRecord> read_tags_csv_file(const std::string& path)
{
    return with_ifstream(path, [](std::istream& is) { return read_tags_csv(is); });
}

} // namespace qtwtt
