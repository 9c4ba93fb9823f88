#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lczmap/error.hpp"

namespace lcz {

// Little-endian binary file helpers shared by the raster, patch-set and
// model serializers. Byte order is written explicitly so files stay
// portable across hosts.

class BinWriter {
public:
    explicit BinWriter(const std::string& path) : path_(path), f_(path, std::ios::binary) {
        require(static_cast<bool>(f_), Errc::io, "cannot open for writing: " + path);
    }

    void bytes(const void* p, std::size_t n) {
        f_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        require(static_cast<bool>(f_), Errc::io, "write failed: " + path_);
    }

    void u8(std::uint8_t v) { bytes(&v, 1); }

    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }

    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }

    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

    void f32(float v) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u32(u);
    }

    void f32_array(const float* p, std::size_t n) {
        // Bulk path: hosts we target are little-endian, but keep the
        // per-element path correct regardless.
        for (std::size_t i = 0; i < n; ++i) f32(p[i]);
    }

private:
    std::string path_;
    std::ofstream f_;
};

class BinReader {
public:
    explicit BinReader(const std::string& path) : path_(path), f_(path, std::ios::binary) {
        require(static_cast<bool>(f_), Errc::io, "cannot open for reading: " + path);
    }

    void bytes(void* p, std::size_t n) {
        f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        require(static_cast<bool>(f_), Errc::io, "truncated file: " + path_);
    }

    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }

    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    float f32() {
        std::uint32_t u = u32();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }

    void f32_array(float* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) p[i] = f32();
    }

    bool at_eof() {
        f_.peek();
        return f_.eof();
    }

private:
    std::string path_;
    std::ifstream f_;
};

} // namespace lcz
