#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "lczmap/error.hpp"
#include "lczmap/raster.hpp"
#include "lczmap/render.hpp"
#include "lczmap/rng.hpp"
#include "png_decode.hpp"

using namespace lcz;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "lczmap_raster_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RasterStack random_stack(int w, int h, int b, std::uint64_t seed) {
    RasterStack s(w, h, b);
    Rng rng(seed);
    for (float& v : s.data) v = static_cast<float>(rng.next_unit());
    return s;
}

} // namespace

TEST_CASE("load_raster reads a minimal well-formed pair") {
    fs::path hdr = temp_dir() / "mini.hdr";
    fs::path bin = temp_dir() / "mini.bin";
    {
        std::ofstream h(hdr);
        h << "width=2\nheight=2\nbands=1\ndtype=float32\nbyteorder=little\ninterleave=bsq\n"
          << "data=mini.bin\n";
        float vals[4] = {1.0f, 2.0f, 3.0f, 4.0f};
        std::ofstream b(bin, std::ios::binary);
        b.write(reinterpret_cast<const char*>(vals), 16);
    }
    RasterStack s = load_raster(hdr.string());
    CHECK(s.width == 2);
    CHECK(s.height == 2);
    CHECK(s.bands == 1);
    CHECK(s.at(0, 0, 0) == 1.0f);
    CHECK(s.at(1, 1, 0) == 4.0f);
}

TEST_CASE("load_raster rejects payload length mismatch") {
    fs::path hdr = temp_dir() / "short.hdr";
    fs::path bin = temp_dir() / "short.bin";
    {
        std::ofstream h(hdr);
        h << "width=2\nheight=2\nbands=10\ndtype=float32\ndata=short.bin\n";
        std::ofstream b(bin, std::ios::binary);
        float v = 0.0f;
        b.write(reinterpret_cast<const char*>(&v), 4);
    }
    CHECK_THROWS_WITH_AS(load_raster(hdr.string()), doctest::Contains("length mismatch"), Error);
}

TEST_CASE("load_raster errors on missing file and unsupported dtype") {
    CHECK_THROWS_AS(load_raster((temp_dir() / "nope.hdr").string()), Error);

    fs::path hdr = temp_dir() / "u8.hdr";
    {
        std::ofstream h(hdr);
        h << "width=1\nheight=1\nbands=1\ndtype=uint8\ndata=u8.bin\n";
        std::ofstream b(temp_dir() / "u8.bin", std::ios::binary);
        b.put(0);
    }
    CHECK_THROWS_AS(load_raster(hdr.string()), Error);
}

TEST_CASE("save/load round-trip is bit-exact") {
    RasterStack s = random_stack(7, 5, 10, 42);
    fs::path hdr = temp_dir() / "rt.hdr";
    save_raster(s, hdr.string());
    RasterStack t = load_raster(hdr.string());
    REQUIRE(t.data.size() == s.data.size());
    CHECK(std::memcmp(t.data.data(), s.data.data(), s.data.size() * 4) == 0);
}

TEST_CASE("zero-band stacks are rejected") {
    CHECK_THROWS_AS(RasterStack(2, 2, 0), Error);
    RasterStack s(2, 2, 1);
    s.bands = 0; // corrupt in place
    CHECK_THROWS_AS(save_raster(s, (temp_dir() / "zb.hdr").string()), Error);
}

TEST_CASE("payload size arithmetic matches the full-scene dims") {
    CHECK(raster_payload_bytes(4192, 2192, 10) == 367554560ull);
    // small case verified against an actual file
    RasterStack s = random_stack(6, 4, 10, 7);
    fs::path hdr = temp_dir() / "sz.hdr";
    save_raster(s, hdr.string());
    CHECK(fs::file_size(temp_dir() / "sz.bin") == raster_payload_bytes(6, 4, 10));
}

TEST_CASE("normalize divides by the global maximum") {
    RasterStack s(3, 3, 2);
    for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = static_cast<float>(i);
    RasterStack n = normalize(s);
    CHECK(n.data.back() == 1.0f); // the argmax pixel lands exactly on 1
    for (float v : n.data) CHECK(v <= 1.0f);

    SUBCASE("constant stack maps to all ones") {
        RasterStack c(4, 4, 3);
        for (float& v : c.data) v = 0.37f;
        RasterStack nc = normalize(c);
        for (float v : nc.data) CHECK(v == 1.0f);
    }

    SUBCASE("16-bit range example") {
        RasterStack c(2, 1, 1);
        c.data = {65535.0f, 32767.0f};
        RasterStack nc = normalize(c);
        CHECK(nc.data[0] == 1.0f);
        CHECK(nc.data[1] == doctest::Approx(0.499992).epsilon(1e-5));
        CHECK(nc.data[1] == 32767.0f / 65535.0f);
    }

    SUBCASE("all-zero stack is an error") {
        RasterStack z(2, 2, 1);
        CHECK_THROWS_AS(normalize(z), Error);
    }

    SUBCASE("idempotent once max is 1") {
        RasterStack n2 = normalize(n);
        CHECK(n2.data == n.data);
    }
}

namespace {

// Independent high-pass-filter reference: same definition, naive layout.
RasterStack hpf_reference(const RasterStack& fine, const RasterStack& coarse) {
    const int w = fine.width, h = fine.height;
    RasterStack out(w, h, 6);
    auto pan = [&](int i, int j) {
        double s = 0;
        for (int b = 0; b < 4; ++b) s += fine.at(i, j, b);
        return static_cast<float>(s / 4.0);
    };
    auto mirror = [](int i, int n) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * (n - 1) - i;
        }
        return i;
    };
    for (int b = 0; b < 6; ++b)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                // bilinear upsample, center-aligned, edge-clamped
                double sy = (i + 0.5) / 2.0 - 0.5, sx = (j + 0.5) / 2.0 - 0.5;
                int y0 = static_cast<int>(std::floor(sy)), x0 = static_cast<int>(std::floor(sx));
                double fy = sy - y0, fx = sx - x0;
                auto cl = [](int v, int n) { return std::clamp(v, 0, n - 1); };
                double up = 0;
                up += coarse.at(cl(y0, coarse.height), cl(x0, coarse.width), b) * (1 - fy) * (1 - fx);
                up += coarse.at(cl(y0, coarse.height), cl(x0 + 1, coarse.width), b) * (1 - fy) * fx;
                up += coarse.at(cl(y0 + 1, coarse.height), cl(x0, coarse.width), b) * fy * (1 - fx);
                up += coarse.at(cl(y0 + 1, coarse.height), cl(x0 + 1, coarse.width), b) * fy * fx;
                double blur = 0;
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) blur += pan(mirror(i + di, h), mirror(j + dj, w));
                double v = up + (pan(i, j) - blur / 9.0);
                out.at(i, j, b) = static_cast<float>(std::max(v, 0.0));
            }
    return out;
}

} // namespace

TEST_CASE("pansharpen") {
    SUBCASE("flat fields pass through exactly") {
        RasterStack fine(8, 8, 4);
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) fine.at(i, j, b) = 0.25f * (b + 1);
        RasterStack coarse(4, 4, 6);
        for (int b = 0; b < 6; ++b)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) coarse.at(i, j, b) = 0.1f * (b + 1);
        RasterStack out = pansharpen(fine, coarse);
        CHECK(out.width == 8);
        CHECK(out.height == 8);
        CHECK(out.bands == 6);
        for (int b = 0; b < 6; ++b)
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) CHECK(out.at(i, j, b) == 0.1f * (b + 1));
    }

    SUBCASE("bright pixel perturbs only the blur support, matches reference") {
        RasterStack fine(8, 8, 4);
        for (float& v : fine.data) v = 0.2f;
        for (int b = 0; b < 4; ++b) fine.at(4, 4, b) = 1.0f;
        RasterStack coarse = random_stack(4, 4, 6, 11);
        RasterStack out = pansharpen(fine, coarse);
        RasterStack ref = hpf_reference(fine, coarse);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            CHECK(out.data[i] == doctest::Approx(ref.data[i]).epsilon(1e-6));

        // Away from the bright pixel the output equals the plain upsample.
        RasterStack flat_fine(8, 8, 4);
        for (float& v : flat_fine.data) v = 0.2f;
        RasterStack up = pansharpen(flat_fine, coarse); // flat -> pure upsample
        for (int b = 0; b < 6; ++b)
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    if (std::abs(i - 4) <= 1 && std::abs(j - 4) <= 1) continue;
                    CHECK(out.at(i, j, b) == doctest::Approx(up.at(i, j, b)).epsilon(1e-6));
                }
    }

    SUBCASE("dimension and band mismatches are errors") {
        CHECK_THROWS_AS(pansharpen(random_stack(8, 8, 4, 1), random_stack(3, 4, 6, 2)), Error);
        CHECK_THROWS_AS(pansharpen(random_stack(8, 8, 3, 1), random_stack(4, 4, 6, 2)), Error);
        CHECK_THROWS_AS(pansharpen(random_stack(8, 8, 4, 1), random_stack(4, 4, 5, 2)), Error);
    }
}

TEST_CASE("render_map writes palette-exact PNGs") {
    Palette pal = default_palette();

    SUBCASE("single red pixel") {
        Palette p = pal;
        p.entries[0] = Rgb{255, 0, 0};
        LabelMap m(1, 1);
        fs::path png = temp_dir() / "one.png";
        render_map(m, p, png.string());
        testpng::Image img = testpng::read_png(png.string());
        REQUIRE(img.width == 1);
        REQUIRE(img.height == 1);
        CHECK(img.rgb[0] == 255);
        CHECK(img.rgb[1] == 0);
        CHECK(img.rgb[2] == 0);
    }

    SUBCASE("label out of range is an error") {
        LabelMap m(2, 2);
        m.labels[3] = 14;
        CHECK_THROWS_AS(render_map(m, pal, (temp_dir() / "bad.png").string()), Error);
    }

    SUBCASE("checkerboard has exactly two colors in checker layout") {
        LabelMap m(6, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 6; ++j) m.at(i, j) = static_cast<std::uint8_t>((i + j) % 2);
        fs::path png = temp_dir() / "check.png";
        render_map(m, pal, png.string());
        testpng::Image img = testpng::read_png(png.string());
        std::set<std::array<std::uint8_t, 3>> colors;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 6; ++j) {
                const std::uint8_t* px = &img.rgb[(static_cast<std::size_t>(i) * 6 + j) * 3];
                colors.insert({px[0], px[1], px[2]});
                const Rgb& want = pal.entries[(i + j) % 2];
                CHECK(px[0] == want.r);
                CHECK(px[1] == want.g);
                CHECK(px[2] == want.b);
            }
        CHECK(colors.size() == 2);
    }
}

TEST_CASE("palette loading and validation") {
    fs::path csv = temp_dir() / "pal.csv";
    {
        std::ofstream f(csv);
        f << "class_id,R,G,B\n";
        for (int k = 0; k < 14; ++k) f << k << "," << 10 * k << "," << 255 - 10 * k << ",7\n";
    }
    Palette p = load_palette_csv(csv.string());
    CHECK(p.entries[3].r == 30);

    {
        std::ofstream f(csv);
        f << "0,1,2,3\n"; // 13 classes missing
    }
    CHECK_THROWS_AS(load_palette_csv(csv.string()), Error);
}

TEST_CASE("mirror_index reflects without repeating the edge") {
    CHECK(mirror_index(-1, 10) == 1);
    CHECK(mirror_index(-2, 10) == 2);
    CHECK(mirror_index(0, 10) == 0);
    CHECK(mirror_index(9, 10) == 9);
    CHECK(mirror_index(10, 10) == 8);
    CHECK(mirror_index(12, 10) == 6);
    CHECK(mirror_index(-1, 1) == 0);
    CHECK(mirror_index(5, 1) == 0);
    for (int i = -30; i < 30; ++i) {
        int m = mirror_index(i, 7);
        CHECK(m >= 0);
        CHECK(m < 7);
    }
}
