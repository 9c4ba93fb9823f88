#include "lczmap/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lczmap/error.hpp"

namespace fs = std::filesystem;

namespace lcz {

RasterStack::RasterStack(int w, int h, int b, float res_m)
    : width(w), height(h), bands(b), resolution_m(res_m) {
    require(w > 0 && h > 0 && b > 0, Errc::invalid, "raster dims must be positive");
    data.assign(size(), 0.0f);
}

void RasterStack::validate() const {
    require(width > 0 && height > 0 && bands > 0, Errc::invalid, "raster dims must be positive");
    require(data.size() == size(), Errc::invalid, "raster buffer length mismatch");
    for (float v : data)
        require(std::isfinite(v), Errc::numeric, "raster contains non-finite values");
}

std::uint64_t raster_payload_bytes(int width, int height, int bands) {
    return static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height) *
           static_cast<std::uint64_t>(bands) * 4u;
}

namespace {

struct Header {
    int width = 0, height = 0, bands = 0;
    std::string dtype = "float32";
    std::string byteorder = "little";
    std::string interleave = "bsq";
    float resolution_m = 0.0f;
    std::string data_file; // relative to the header's directory
};

Header parse_header(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open raster header: " + path);

    Header h;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t eq = line.find('=');
        require(eq != std::string::npos, Errc::invalid, "malformed header line: " + line);
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t");
            std::size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "width") h.width = std::stoi(val);
        else if (key == "height") h.height = std::stoi(val);
        else if (key == "bands") h.bands = std::stoi(val);
        else if (key == "dtype") h.dtype = val;
        else if (key == "byteorder") h.byteorder = val;
        else if (key == "interleave") h.interleave = val;
        else if (key == "resolution_m") h.resolution_m = std::stof(val);
        else if (key == "data") h.data_file = val;
        // unknown keys are ignored for forward compatibility
    }
    require(h.width > 0 && h.height > 0 && h.bands > 0, Errc::invalid,
            "raster header missing or non-positive width/height/bands: " + path);
    require(h.byteorder == "little", Errc::unsupported, "unsupported byteorder: " + h.byteorder);
    require(h.interleave == "bsq", Errc::unsupported, "unsupported interleave: " + h.interleave);
    if (h.data_file.empty()) h.data_file = fs::path(path).stem().string() + ".bin";
    return h;
}

std::string payload_path(const std::string& header_path, const std::string& data_file) {
    fs::path p = fs::path(header_path).parent_path() / data_file;
    return p.string();
}

std::vector<std::uint8_t> read_payload(const std::string& path, std::uint64_t expected_bytes) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    require(static_cast<bool>(f), Errc::io, "cannot open raster payload: " + path);
    std::uint64_t actual = static_cast<std::uint64_t>(f.tellg());
    if (actual != expected_bytes) {
        std::ostringstream oss;
        oss << "payload length mismatch: " << path << " has " << actual << " bytes, header implies "
            << expected_bytes;
        fail(Errc::invalid, oss.str());
    }
    f.seekg(0);
    std::vector<std::uint8_t> buf(expected_bytes);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expected_bytes));
    require(static_cast<bool>(f), Errc::io, "short read on raster payload: " + path);
    return buf;
}

void write_header(const std::string& path, int w, int h, int b, const std::string& dtype,
                  float res_m, const std::string& data_file) {
    std::ofstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open raster header for writing: " + path);
    f << "width=" << w << "\n"
      << "height=" << h << "\n"
      << "bands=" << b << "\n"
      << "dtype=" << dtype << "\n"
      << "byteorder=little\n"
      << "interleave=bsq\n";
    if (res_m > 0.0f) f << "resolution_m=" << res_m << "\n";
    f << "data=" << data_file << "\n";
    require(static_cast<bool>(f), Errc::io, "write failed: " + path);
}

} // namespace

RasterStack load_raster(const std::string& header_path) {
    Header h = parse_header(header_path);
    require(h.dtype == "float32", Errc::unsupported,
            "unsupported dtype for a raster stack: " + h.dtype);

    RasterStack s(h.width, h.height, h.bands, h.resolution_m);
    std::vector<std::uint8_t> raw =
        read_payload(payload_path(header_path, h.data_file), raster_payload_bytes(h.width, h.height, h.bands));
    static_assert(sizeof(float) == 4);
    std::memcpy(s.data.data(), raw.data(), raw.size()); // little-endian host
    s.validate();
    return s;
}

void save_raster(const RasterStack& stack, const std::string& header_path) {
    stack.validate();
    std::string data_file = fs::path(header_path).stem().string() + ".bin";
    write_header(header_path, stack.width, stack.height, stack.bands, "float32",
                 stack.resolution_m, data_file);

    std::ofstream f(payload_path(header_path, data_file), std::ios::binary);
    require(static_cast<bool>(f), Errc::io, "cannot open raster payload for writing");
    f.write(reinterpret_cast<const char*>(stack.data.data()),
            static_cast<std::streamsize>(raster_payload_bytes(stack.width, stack.height, stack.bands)));
    require(static_cast<bool>(f), Errc::io, "write failed on raster payload");
}

RasterStack normalize(const RasterStack& stack) {
    stack.validate();
    float max_v = 0.0f;
    for (float v : stack.data) {
        require(v >= 0.0f, Errc::invalid, "normalize expects non-negative values");
        max_v = std::max(max_v, v);
    }
    require(max_v > 0.0f, Errc::invalid, "cannot normalize an all-zero stack");

    RasterStack out = stack;
    for (float& v : out.data) v = v / max_v;
    return out;
}

namespace {

/// Bilinear 2x upsample of one band, edge-clamped, centers aligned.
void upsample2x(const RasterStack& src, int band, RasterStack& dst, int dst_band) {
    const int wc = src.width, hc = src.height;
    for (int i = 0; i < dst.height; ++i) {
        double sy = (i + 0.5) / 2.0 - 0.5;
        int y0 = static_cast<int>(std::floor(sy));
        double fy = sy - y0;
        int ya = std::clamp(y0, 0, hc - 1);
        int yb = std::clamp(y0 + 1, 0, hc - 1);
        for (int j = 0; j < dst.width; ++j) {
            double sx = (j + 0.5) / 2.0 - 0.5;
            int x0 = static_cast<int>(std::floor(sx));
            double fx = sx - x0;
            int xa = std::clamp(x0, 0, wc - 1);
            int xb = std::clamp(x0 + 1, 0, wc - 1);
            double top = src.at(ya, xa, band) * (1.0 - fx) + src.at(ya, xb, band) * fx;
            double bot = src.at(yb, xa, band) * (1.0 - fx) + src.at(yb, xb, band) * fx;
            dst.at(i, j, dst_band) = static_cast<float>(top * (1.0 - fy) + bot * fy);
        }
    }
}

} // namespace

RasterStack pansharpen(const RasterStack& fine, const RasterStack& coarse) {
    fine.validate();
    coarse.validate();
    require(fine.bands == 4, Errc::invalid, "pansharpen expects 4 fine bands");
    require(coarse.bands == 6, Errc::invalid, "pansharpen expects 6 coarse bands");
    require(fine.width == 2 * coarse.width && fine.height == 2 * coarse.height, Errc::invalid,
            "fine dims must be exactly twice the coarse dims");

    const int w = fine.width, h = fine.height;

    // Synthetic pan: per-pixel mean of the fine bands.
    std::vector<float> pan(static_cast<std::size_t>(w) * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            float s = 0.0f;
            for (int b = 0; b < 4; ++b) s += fine.at(i, j, b);
            pan[static_cast<std::size_t>(i) * w + j] = s / 4.0f;
        }

    // High-pass component: pan minus its 3x3 box blur (reflected borders,
    // so a flat field yields an identically-zero high-pass term).
    std::vector<float> hp(pan.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            // Double accumulation keeps the blur of a constant field exact,
            // so flat inputs produce an identically-zero high-pass term.
            double s = 0.0;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    s += pan[static_cast<std::size_t>(mirror_index(i + di, h)) * w + mirror_index(j + dj, w)];
            hp[static_cast<std::size_t>(i) * w + j] =
                pan[static_cast<std::size_t>(i) * w + j] - static_cast<float>(s / 9.0);
        }

    RasterStack out(w, h, 6, fine.resolution_m);
    for (int b = 0; b < 6; ++b) {
        upsample2x(coarse, b, out, b);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                float v = out.at(i, j, b) + hp[static_cast<std::size_t>(i) * w + j];
                out.at(i, j, b) = std::max(v, 0.0f);
            }
    }
    return out;
}

} // namespace lcz
