#include "shgs/io.hpp"

#include "shgs/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shgs {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "raw formats assume a little-endian host");

void append_double(std::string& out, double v) {
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof v);
    out.append(buf, sizeof buf);
}

double read_double(const std::string& in, std::size_t offset) {
    double v;
    std::memcpy(&v, in.data() + offset, sizeof v);
    return v;
}

} // namespace

void write_atomic(const fs::path& path, std::string_view bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_kspace(const fs::path& header, const KSpace& k) {
    fs::path raw = header;
    raw.replace_extension(".raw");
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(k.channels()) * k.nx * k.ny * 16);
    for (const auto& X : k.data) {
        if (X.rows() != k.nx || X.cols() != k.ny) throw Error(ErrorCode::DimensionMismatch, "channel size");
        for (int p = 0; p < k.nx; ++p)
            for (int q = 0; q < k.ny; ++q) {
                append_double(bytes, X(p, q).real());
                append_double(bytes, X(p, q).imag());
            }
    }
    const nlohmann::json h{{"version", 1},
                           {"channels", k.channels()},
                           {"nx", k.nx},
                           {"ny", k.ny},
                           {"dtype", "complex128-le"},
                           {"layout", "channel-major row-major"},
                           {"data", raw.filename().string()}};
    write_atomic(raw, bytes);
    write_atomic(header, h.dump(2) + "\n");
}

KSpace read_kspace(const fs::path& header) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(read_file(header));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, "bad k-space header " + header.string() + ": " + e.what());
    }
    if (h.value("dtype", "") != "complex128-le" || h.value("layout", "") != "channel-major row-major")
        throw Error(ErrorCode::Io, "unsupported k-space encoding in " + header.string());
    KSpace k;
    k.nx = h.at("nx").get<int>();
    k.ny = h.at("ny").get<int>();
    const int channels = h.at("channels").get<int>();
    fs::path raw = header.parent_path() / h.value("data", header.stem().string() + ".raw");
    const std::string bytes = read_file(raw);
    const std::size_t expected = static_cast<std::size_t>(channels) * k.nx * k.ny * 16;
    if (bytes.size() != expected) throw Error(ErrorCode::Io, "k-space raw file has the wrong size");
    std::size_t off = 0;
    for (int c = 0; c < channels; ++c) {
        Eigen::MatrixXcd X(k.nx, k.ny);
        for (int p = 0; p < k.nx; ++p)
            for (int q = 0; q < k.ny; ++q) {
                X(p, q) = {read_double(bytes, off), read_double(bytes, off + 8)};
                off += 16;
            }
        k.data.push_back(std::move(X));
    }
    return k;
}

void write_pgm(const fs::path& path, const Image& img, bool sidecar) {
    if (!img.allFinite()) throw Error(ErrorCode::Io, "image has non-finite pixels");
    const int nx = static_cast<int>(img.rows()), ny = static_cast<int>(img.cols());
    const double peak = img.size() ? img.maxCoeff() : 0.0;
    std::string bytes = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n65535\n";
    std::string raw;
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            const double v = peak > 0.0 ? std::clamp(img(p, q) / peak, 0.0, 1.0) : 0.0;
            const auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
            bytes.push_back(static_cast<char>(s >> 8));
            bytes.push_back(static_cast<char>(s & 0xff));
            if (sidecar) append_double(raw, img(p, q));
        }
    write_atomic(path, bytes);
    if (sidecar) {
        fs::path side = path;
        side += ".raw";
        write_atomic(side, raw);
    }
}

Image read_pgm(const fs::path& path) {
    const std::string bytes = read_file(path);
    std::istringstream in(bytes);
    std::string magic;
    int nx = 0, ny = 0, maxval = 0;
    in >> magic >> nx >> ny >> maxval;
    if (magic != "P5" || nx <= 0 || ny <= 0 || maxval != 65535) throw Error(ErrorCode::Io, "unsupported PGM " + path.string());
    const auto start = static_cast<std::size_t>(in.tellg()) + 1;
    if (bytes.size() != start + static_cast<std::size_t>(nx) * ny * 2) throw Error(ErrorCode::Io, "truncated PGM");
    Image img(nx, ny);
    std::size_t off = start;
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            const auto hi = static_cast<unsigned char>(bytes[off]), lo = static_cast<unsigned char>(bytes[off + 1]);
            img(p, q) = (hi << 8) | lo;
            off += 2;
        }
    return img;
}

Image read_raw_image(const fs::path& path, int nx, int ny) {
    const std::string bytes = read_file(path);
    if (bytes.size() != static_cast<std::size_t>(nx) * ny * 8) throw Error(ErrorCode::Io, "raw image has the wrong size");
    Image img(nx, ny);
    std::size_t off = 0;
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p, off += 8) img(p, q) = read_double(bytes, off);
    return img;
}

std::string csv_number(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

} // namespace shgs
