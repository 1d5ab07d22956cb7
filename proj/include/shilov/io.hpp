#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "shilov/boundary.hpp"
#include "shilov/function_algebra.hpp"
#include "shilov/spaces.hpp"

namespace shilov::io {

using Json = nlohmann::json;

/// Malformed or incomplete serialized input.
struct FormatError : Error {
  using Error::Error;
};

// Complex numbers are [re, im] pairs; vectors and matrices nest them.
Json to_json(cplx z);
Json to_json(const VectorXc& v);
Json to_json(const MatrixXc& m);  // row-major
cplx complex_from_json(const Json& j);
VectorXc vector_from_json(const Json& j);
MatrixXc matrix_from_json(const Json& j);

/// {"dim", "structure": c[i][j][k], "unit", "weights", "label"}.
Json to_json(const Algebra& E);
/// A preset name ("pointwise_2", "dual_numbers", ...) or an inline object.
Algebra algebra_from_json(const Json& j);

/// {"algebra": label, "characters": [{"label", "values"}]}.
Json characters_to_json(const Algebra& E, const std::vector<Character<double>>& chars);

/// {"points", "coords"?, "metric"?}.
Json to_json(const FiniteSpace& X);
FiniteSpace space_from_json(const Json& j);

/// {"space", "algebra", "basis": [table...], "norm": "sup" | {"lipschitz": a}, "closed", "label"}.
Json to_json(const FunctionSystem& S);
FunctionSystem system_from_json(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const WitnessFamily& W);
WitnessFamily witness_family_from_json(const Json& j);
Json to_json(const PeakCertificate& c, const WitnessFamily& W);
Json to_json(const ShilovEstimate& est, const WitnessFamily& W);
Json to_json(const ProductReport& r);
Json to_json(const ProductPeaker& g);

// ---------------------------------------------------------------- rasters

/// Plain PGM (P2) with the given maxval.
std::string pgm(const Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>& gray, int maxval = 255);
/// Raster as P2, 0 = unset and 255 = set, row 0 (lowest) printed last.
std::string raster_pgm(const RasterRegion& R);
/// {"origin": [re, im], "pixel_size": h}.
Json raster_sidecar(const RasterRegion& R);
RasterRegion raster_from_pgm(const std::string& pgm_text, const Json& sidecar);

inline constexpr int kOverlayNotPeak = 0;
inline constexpr int kOverlayUndecided = 128;
inline constexpr int kOverlayPeak = 255;
/// Three-level status image on R's grid: each candidate paints its nearest
/// pixel; pixels without a candidate read as not_peak.
std::string status_overlay_pgm(const RasterRegion& R, const std::vector<cplx>& points,
                               const std::vector<PeakStatus>& status);
/// "x,y,status" with a header line, one row per candidate with coordinates.
std::string status_csv(const std::vector<cplx>& points, const std::vector<PeakStatus>& status);
/// "x,y" with a header line.
std::string points_csv(const std::vector<cplx>& points);

// ---------------------------------------------------------------- files

std::string read_file(const std::string& path);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::string& path, const std::string& content);
/// Stable JSON text: sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);
/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace shilov::io
