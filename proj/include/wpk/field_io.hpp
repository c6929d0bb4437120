#pragma once

#include "wpk/field.hpp"

#include <filesystem>
#include <stdexcept>

namespace wpk {

/// WPK1 binary field format, little-endian, no padding:
///   "WPK1" | u64 n | f64 x_min | f64 dx | n x (f64 re, f64 im)
class FormatError : public std::runtime_error {
public:
    enum class Kind { io, header, truncated, nonfinite };
    FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

void save_field(const ComplexField& f, const std::filesystem::path& path);
ComplexField load_field(const std::filesystem::path& path);

/// Writes one WPK1 file per slice (slice_00000.wpk, ...) into dir together
/// with index.json listing times and file names.
void save_spacetime(const SpacetimeField& u, const std::filesystem::path& dir);
SpacetimeField load_spacetime(const std::filesystem::path& dir);

} // namespace wpk
