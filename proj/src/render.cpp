#include "lczmap/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "lczmap/error.hpp"

namespace lcz {

void Palette::validate() const {
    for (int i = 0; i < kClassCount; ++i)
        for (int j = i + 1; j < kClassCount; ++j)
            require(!(entries[i] == entries[j]), Errc::invalid,
                    "palette has two identical colors");
}

Palette default_palette() {
    Palette p;
    for (int k = 0; k < kClassCount; ++k) {
        double h = 360.0 * k / kClassCount / 60.0; // sector in [0,6)
        int sector = static_cast<int>(h) % 6;
        double f = h - std::floor(h);
        auto to8 = [](double x) { return static_cast<std::uint8_t>(std::lround(255.0 * x)); };
        double q = 1.0 - f, t = f;
        double r = 0, g = 0, b = 0;
        switch (sector) {
            case 0: r = 1; g = t; b = 0; break;
            case 1: r = q; g = 1; b = 0; break;
            case 2: r = 0; g = 1; b = t; break;
            case 3: r = 0; g = q; b = 1; break;
            case 4: r = t; g = 0; b = 1; break;
            default: r = 1; g = 0; b = q; break;
        }
        p.entries[k] = Rgb{to8(r), to8(g), to8(b)};
    }
    p.validate();
    return p;
}

Palette load_palette_csv(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open palette CSV: " + path);

    Palette p;
    std::array<bool, kClassCount> seen{};
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line.find_first_not_of("0123456789") != std::string::npos &&
            !std::isdigit(static_cast<unsigned char>(line[0]))) {
            first = false;
            continue; // header line
        }
        first = false;
        std::istringstream ss(line);
        int id, r, g, b;
        char c1, c2, c3;
        ss >> id >> c1 >> r >> c2 >> g >> c3 >> b;
        require(static_cast<bool>(ss) && c1 == ',' && c2 == ',' && c3 == ',', Errc::invalid,
                "malformed palette row: " + line);
        require(id >= 0 && id < kClassCount, Errc::invalid, "palette class id out of range: " + line);
        require(!seen[id], Errc::invalid, "duplicate palette class id: " + line);
        require(r >= 0 && r <= 255 && g >= 0 && g <= 255 && b >= 0 && b <= 255, Errc::invalid,
                "palette channel out of range: " + line);
        p.entries[id] = Rgb{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                            static_cast<std::uint8_t>(b)};
        seen[id] = true;
    }
    for (int k = 0; k < kClassCount; ++k)
        require(seen[k], Errc::invalid, "palette is missing class id " + std::to_string(k));
    p.validate();
    return p;
}

namespace {

// Self-contained PNG writer: truecolor 8-bit, zlib stream with stored
// (uncompressed) deflate blocks. Keeps the renderer dependency-free.

const std::uint32_t* crc_table() {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            table[n] = c;
        }
        init = true;
    }
    return table;
}

std::uint32_t crc32_update(std::uint32_t crc, const std::uint8_t* p, std::size_t n) {
    const std::uint32_t* t = crc_table();
    crc ^= 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) crc = t[(crc ^ p[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const std::uint8_t* p, std::size_t n) {
    std::uint32_t a = 1, b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        a = (a + p[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

void put_u32be(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x >> 24));
    v.push_back(static_cast<std::uint8_t>(x >> 16));
    v.push_back(static_cast<std::uint8_t>(x >> 8));
    v.push_back(static_cast<std::uint8_t>(x));
}

void write_chunk(std::ofstream& f, const char type[4], const std::uint8_t* data, std::size_t n) {
    std::vector<std::uint8_t> hdr;
    put_u32be(hdr, static_cast<std::uint32_t>(n));
    f.write(reinterpret_cast<const char*>(hdr.data()), 4);
    f.write(type, 4);
    if (n) f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
    // CRC covers the type field and the data, not the length.
    std::vector<std::uint8_t> all(4 + n);
    std::memcpy(all.data(), type, 4);
    if (n) std::memcpy(all.data() + 4, data, n);
    std::uint32_t crc = crc32_update(0, all.data(), all.size());
    std::vector<std::uint8_t> tail;
    put_u32be(tail, crc);
    f.write(reinterpret_cast<const char*>(tail.data()), 4);
}

std::vector<std::uint8_t> zlib_stored(const std::uint8_t* data, std::size_t size) {
    std::vector<std::uint8_t> out;
    out.reserve(size + size / 65535 * 5 + 16);
    out.push_back(0x78u); // deflate, 32k window
    out.push_back(0x01u); // no preset dict
    std::size_t remaining = size;
    const std::uint8_t* p = data;
    do {
        std::uint16_t chunk = static_cast<std::uint16_t>(std::min<std::size_t>(remaining, 65535u));
        bool final = remaining == chunk;
        out.push_back(final ? 0x01u : 0x00u);
        out.push_back(static_cast<std::uint8_t>(chunk & 0xFFu));
        out.push_back(static_cast<std::uint8_t>(chunk >> 8));
        std::uint16_t nlen = static_cast<std::uint16_t>(chunk ^ 0xFFFFu);
        out.push_back(static_cast<std::uint8_t>(nlen & 0xFFu));
        out.push_back(static_cast<std::uint8_t>(nlen >> 8));
        out.insert(out.end(), p, p + chunk);
        p += chunk;
        remaining -= chunk;
    } while (remaining > 0);
    std::uint32_t adler = adler32(data, size);
    put_u32be(out, adler);
    return out;
}

} // namespace

void render_map(const LabelMap& map, const Palette& palette, const std::string& png_path) {
    map.validate();
    palette.validate();

    const int w = map.width, h = map.height;
    const std::size_t row_bytes = 1u + static_cast<std::size_t>(w) * 3u;
    std::vector<std::uint8_t> raw(row_bytes * static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) {
        std::uint8_t* row = raw.data() + static_cast<std::size_t>(y) * row_bytes;
        row[0] = 0; // filter: none
        for (int x = 0; x < w; ++x) {
            const Rgb& c = palette.entries[map.at(y, x)];
            row[1 + 3 * x + 0] = c.r;
            row[1 + 3 * x + 1] = c.g;
            row[1 + 3 * x + 2] = c.b;
        }
    }

    std::vector<std::uint8_t> z = zlib_stored(raw.data(), raw.size());

    std::ofstream f(png_path, std::ios::binary);
    require(static_cast<bool>(f), Errc::io, "cannot open PNG for writing: " + png_path);
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    f.write(reinterpret_cast<const char*>(sig), 8);

    std::uint8_t ihdr[13] = {};
    ihdr[0] = static_cast<std::uint8_t>(w >> 24);
    ihdr[1] = static_cast<std::uint8_t>(w >> 16);
    ihdr[2] = static_cast<std::uint8_t>(w >> 8);
    ihdr[3] = static_cast<std::uint8_t>(w);
    ihdr[4] = static_cast<std::uint8_t>(h >> 24);
    ihdr[5] = static_cast<std::uint8_t>(h >> 16);
    ihdr[6] = static_cast<std::uint8_t>(h >> 8);
    ihdr[7] = static_cast<std::uint8_t>(h);
    ihdr[8] = 8;  // bit depth
    ihdr[9] = 2;  // truecolor
    write_chunk(f, "IHDR", ihdr, sizeof(ihdr));
    write_chunk(f, "IDAT", z.data(), z.size());
    write_chunk(f, "IEND", nullptr, 0);
    require(static_cast<bool>(f), Errc::io, "write failed: " + png_path);
}

} // namespace lcz
