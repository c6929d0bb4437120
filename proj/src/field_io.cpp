#include "wpk/field_io.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wpk {
namespace {

constexpr std::array<char, 4> kMagic{'W', 'P', 'K', '1'};
constexpr std::size_t kHeaderBytes = 4 + 8 + 8 + 8;

template <class T>
void put_le(std::string& out, T value) {
    static_assert(sizeof(T) == 8);
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

template <class T>
T get_le(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return std::bit_cast<T>(bits);
}

} // namespace

void save_field(const ComplexField& f, const std::filesystem::path& path) {
    std::string buf;
    buf.reserve(kHeaderBytes + 16 * f.size());
    buf.append(kMagic.data(), kMagic.size());
    put_le(buf, static_cast<std::uint64_t>(f.size()));
    put_le(buf, f.grid().x_min());
    put_le(buf, f.grid().dx());
    for (const auto& z : f.values()) {
        put_le(buf, z.real());
        put_le(buf, z.imag());
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw FormatError(FormatError::Kind::io, "save_field: cannot open " + path.string());
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os)
        throw FormatError(FormatError::Kind::io, "save_field: write failed for " + path.string());
}

ComplexField load_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError(FormatError::Kind::io, "load_field: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() < kHeaderBytes || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0)
        throw FormatError(FormatError::Kind::header, "load_field: missing WPK1 header in " + path.string());
    const auto n = get_le<std::uint64_t>(buf.data() + 4);
    const auto x_min = get_le<double>(buf.data() + 12);
    const auto dx = get_le<double>(buf.data() + 20);
    if (n > (buf.size() - kHeaderBytes) / 16 || buf.size() != kHeaderBytes + 16 * n)
        throw FormatError(FormatError::Kind::truncated,
                          "load_field: payload length disagrees with declared n=" + std::to_string(n));
    if (!std::isfinite(x_min) || !std::isfinite(dx))
        throw FormatError(FormatError::Kind::header, "load_field: non-finite grid parameters");
    std::vector<cplx> values(n);
    const char* p = buf.data() + kHeaderBytes;
    for (std::size_t i = 0; i < n; ++i, p += 16) {
        const double re = get_le<double>(p);
        const double im = get_le<double>(p + 8);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw FormatError(FormatError::Kind::nonfinite, "load_field: non-finite sample");
        values[i] = {re, im};
    }
    try {
        return ComplexField(Grid1D(n, x_min, dx), std::move(values));
    } catch (const std::invalid_argument& e) {
        throw FormatError(FormatError::Kind::header, std::string("load_field: ") + e.what());
    }
}

void save_spacetime(const SpacetimeField& u, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json index;
    index["format"] = "WPK1-series";
    index["times"] = u.times();
    auto& files = index["files"] = nlohmann::json::array();
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::ostringstream name;
        name << "slice_" << std::setw(5) << std::setfill('0') << i << ".wpk";
        save_field(u.slices()[i], dir / name.str());
        files.push_back(name.str());
    }
    std::ofstream os(dir / "index.json");
    os << index.dump(2) << '\n';
}

SpacetimeField load_spacetime(const std::filesystem::path& dir) {
    std::ifstream is(dir / "index.json");
    if (!is)
        throw FormatError(FormatError::Kind::io, "load_spacetime: missing index.json in " + dir.string());
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatError::Kind::header, std::string("load_spacetime: ") + e.what());
    }
    auto times = index.at("times").get<std::vector<double>>();
    std::vector<ComplexField> slices;
    for (const auto& name : index.at("files"))
        slices.push_back(load_field(dir / name.get<std::string>()));
    return SpacetimeField(std::move(times), std::move(slices));
}

} // namespace wpk
