#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include "crumple/error.hpp"

namespace crumple::wire {

inline std::vector<std::byte> read_bytes_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open file: " + path.string());
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::byte> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw IoError("failed reading file: " + path.string());
    return bytes;
}

inline void write_bytes_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing file: " + path.string());
}

/// Append-only little-endian byte writer.
class Writer {
public:
    void u16(std::uint16_t v) { raw(&v, sizeof v); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void f32(float v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void magic(const char (&m)[5]) { raw(m, 4); }

    std::vector<std::byte> take() { return std::move(bytes_); }
    const std::vector<std::byte>& bytes() const { return bytes_; }

private:
    void raw(const void* p, std::size_t n) {
        static_assert(std::endian::native == std::endian::little,
                      "wire format is little-endian; byte swap needed on this platform");
        const auto* b = static_cast<const std::byte*>(p);
        bytes_.insert(bytes_.end(), b, b + n);
    }

    std::vector<std::byte> bytes_;
};

/// Bounds-checked little-endian reader; throws CodecError on truncation.
class Reader {
public:
    explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

    std::uint16_t u16() { return get<std::uint16_t>(); }
    std::uint32_t u32() { return get<std::uint32_t>(); }
    float f32() { return get<float>(); }
    double f64() { return get<double>(); }

    void expect_magic(const char (&m)[5], const char* what) {
        char got[4];
        raw(got, 4);
        if (std::memcmp(got, m, 4) != 0) {
            throw CodecError(std::string("bad magic for ") + what);
        }
    }

    bool exhausted() const { return pos_ == bytes_.size(); }

    void expect_exhausted(const char* what) {
        if (!exhausted()) {
            throw CodecError(std::string("trailing bytes after ") + what);
        }
    }

private:
    template <typename T>
    T get() {
        T v;
        raw(&v, sizeof v);
        return v;
    }

    void raw(void* p, std::size_t n) {
        static_assert(std::endian::native == std::endian::little,
                      "wire format is little-endian; byte swap needed on this platform");
        if (pos_ + n > bytes_.size()) {
            throw CodecError("truncated payload");
        }
        std::memcpy(p, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::span<const std::byte> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace crumple::wire
