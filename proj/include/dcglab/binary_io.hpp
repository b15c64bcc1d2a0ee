#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcglab::io {

/// Appends little-endian scalars to a byte buffer.
class ByteWriter {
public:
    void bytes(std::string_view raw);
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f32s(std::span<const float> values);

    [[nodiscard]] const std::vector<char>& buffer() const noexcept { return buf_; }

private:
    std::vector<char> buf_;
};

/// Reads little-endian scalars; any read past the end throws FormatError
/// mentioning `what`.
class ByteReader {
public:
    ByteReader(std::span<const char> data, std::string what) : data_(data), what_(std::move(what)) {}

    std::string bytes(std::size_t n);
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    void f32s(std::span<float> out);

    [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    std::span<const char> take(std::size_t n);

    std::span<const char> data_;
    std::size_t pos_ = 0;
    std::string what_;
};

[[nodiscard]] std::vector<char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const char> data);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dcglab::io
