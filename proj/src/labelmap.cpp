#include "lczmap/labelmap.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lczmap/error.hpp"

namespace fs = std::filesystem;

namespace lcz {

LabelMap::LabelMap(int w, int h) : width(w), height(h) {
    require(w > 0 && h > 0, Errc::invalid, "label map dims must be positive");
    labels.assign(static_cast<std::size_t>(w) * h, 0);
}

void LabelMap::validate() const {
    require(width > 0 && height > 0, Errc::invalid, "label map dims must be positive");
    require(labels.size() == static_cast<std::size_t>(width) * height, Errc::invalid,
            "label map buffer length mismatch");
    for (std::uint8_t v : labels)
        require(v < kClassCount, Errc::invalid, "label map contains class id out of range");
}

namespace {

// Minimal duplicate of the raster header parse for the uint8 case; the
// float32 path lives in raster.cpp with the same key set.
struct U8Header {
    int width = 0, height = 0, bands = 1;
    std::string dtype, data_file;
};

U8Header parse(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), Errc::io, "cannot open label map header: " + path);
    U8Header h;
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
        else if (key == "data") h.data_file = val;
        else if (key == "byteorder") require(val == "little", Errc::unsupported, "unsupported byteorder");
        else if (key == "interleave") require(val == "bsq", Errc::unsupported, "unsupported interleave");
    }
    require(h.width > 0 && h.height > 0, Errc::invalid, "label map header missing dims: " + path);
    require(h.bands == 1, Errc::invalid, "label map must be single-band");
    require(h.dtype == "uint8", Errc::unsupported, "label map dtype must be uint8, got: " + h.dtype);
    if (h.data_file.empty()) h.data_file = fs::path(path).stem().string() + ".bin";
    return h;
}

} // namespace

LabelMap load_labelmap(const std::string& header_path) {
    U8Header h = parse(header_path);
    std::string payload = (fs::path(header_path).parent_path() / h.data_file).string();

    std::ifstream f(payload, std::ios::binary | std::ios::ate);
    require(static_cast<bool>(f), Errc::io, "cannot open label map payload: " + payload);
    std::uint64_t expected = static_cast<std::uint64_t>(h.width) * h.height;
    std::uint64_t actual = static_cast<std::uint64_t>(f.tellg());
    if (actual != expected) {
        std::ostringstream oss;
        oss << "payload length mismatch: " << payload << " has " << actual
            << " bytes, header implies " << expected;
        fail(Errc::invalid, oss.str());
    }
    f.seekg(0);

    LabelMap m(h.width, h.height);
    f.read(reinterpret_cast<char*>(m.labels.data()), static_cast<std::streamsize>(expected));
    require(static_cast<bool>(f), Errc::io, "short read on label map payload: " + payload);
    m.validate();
    return m;
}

void save_labelmap(const LabelMap& map, const std::string& header_path) {
    map.validate();
    std::string data_file = fs::path(header_path).stem().string() + ".bin";

    std::ofstream hf(header_path);
    require(static_cast<bool>(hf), Errc::io, "cannot open label map header for writing: " + header_path);
    hf << "width=" << map.width << "\n"
       << "height=" << map.height << "\n"
       << "bands=1\n"
       << "dtype=uint8\n"
       << "byteorder=little\n"
       << "interleave=bsq\n"
       << "data=" << data_file << "\n";
    require(static_cast<bool>(hf), Errc::io, "write failed: " + header_path);

    std::ofstream pf((fs::path(header_path).parent_path() / data_file).string(), std::ios::binary);
    require(static_cast<bool>(pf), Errc::io, "cannot open label map payload for writing");
    pf.write(reinterpret_cast<const char*>(map.labels.data()),
             static_cast<std::streamsize>(map.labels.size()));
    require(static_cast<bool>(pf), Errc::io, "write failed on label map payload");
}

} // namespace lcz
