#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>

#include "amrkit/error.hpp"

namespace amrkit::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class ByteWriter {
public:
    void raw(std::string_view bytes) { buf_.append(bytes); }

    template <typename T>
    void put(T value) {
        char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        buf_.append(bytes, sizeof(T));
    }

    void u8(std::uint8_t v) { put(v); }
    void u32(std::uint32_t v) { put(v); }
    void u64(std::uint64_t v) { put(v); }
    void i32(std::int32_t v) { put(v); }
    void f64(double v) { put(v); }

    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s);
    }

    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

// Reads little-endian values; any overrun throws `code`.
class ByteReader {
public:
    ByteReader(std::string_view data, ErrorCode code) : data_(data), code_(code) {}

    std::string_view raw(std::size_t n) {
        need(n);
        std::string_view out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    template <typename T>
    T get() {
        need(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::uint8_t u8() { return get<std::uint8_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    std::int32_t i32() { return get<std::int32_t>(); }
    double f64() { return get<double>(); }

    std::string str() {
        std::uint32_t n = u32();
        return std::string(raw(n));
    }

    void expect_magic(std::string_view magic) {
        if (data_.size() - pos_ < magic.size() || data_.substr(pos_, magic.size()) != magic)
            fail(code_, "bad magic, expected '" + std::string(magic) + "'");
        pos_ += magic.size();
    }

    // Guards count fields before allocating: each element needs at least
    // `min_bytes_each` remaining bytes.
    void check_count(std::uint64_t count, std::size_t min_bytes_each) {
        if (min_bytes_each != 0 && count > remaining() / min_bytes_each)
            fail(code_, "truncated file: count " + std::to_string(count) + " exceeds remaining data");
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    void expect_end() const {
        if (pos_ != data_.size()) fail(code_, "trailing bytes after payload");
    }
    [[noreturn]] void corrupt(const std::string& what) const { fail(code_, what); }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) fail(code_, "truncated file at byte " + std::to_string(pos_));
    }

    std::string_view data_;
    std::size_t pos_ = 0;
    ErrorCode code_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace amrkit::detail
