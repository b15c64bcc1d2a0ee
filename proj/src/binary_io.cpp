#include "dcglab/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "dcglab/errors.hpp"

namespace dcglab::io {

namespace {

template <typename U>
void put_le(std::vector<char>& buf, U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

template <typename U>
U get_le(std::span<const char> raw) {
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        v |= static_cast<U>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return v;
}

}  // namespace

void ByteWriter::bytes(std::string_view raw) { buf_.insert(buf_.end(), raw.begin(), raw.end()); }
void ByteWriter::u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
void ByteWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void ByteWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void ByteWriter::f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f32s(std::span<const float> values) {
    buf_.reserve(buf_.size() + values.size() * 4);
    for (const float v : values) f32(v);
}

std::span<const char> ByteReader::take(std::size_t n) {
    if (n > remaining()) {
        throw FormatError(what_ + ": truncated (needed " + std::to_string(n) + " bytes at offset " +
                          std::to_string(pos_) + ", " + std::to_string(remaining()) + " left)");
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::string ByteReader::bytes(std::size_t n) {
    const auto raw = take(n);
    return {raw.begin(), raw.end()};
}

std::uint8_t ByteReader::u8() { return static_cast<std::uint8_t>(take(1)[0]); }
std::uint32_t ByteReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t ByteReader::u64() { return get_le<std::uint64_t>(take(8)); }
float ByteReader::f32() { return std::bit_cast<float>(get_le<std::uint32_t>(take(4))); }

void ByteReader::f32s(std::span<float> out) {
    const auto raw = take(out.size() * 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::bit_cast<float>(get_le<std::uint32_t>(raw.subspan(i * 4, 4)));
    }
}

std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const char> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    write_file(path, std::span<const char>(text.data(), text.size()));
}

}  // namespace dcglab::io
