#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "silas/discovery.hpp"
#include "silas/pod.hpp"

namespace silas {

using Json = nlohmann::json;

/// Stable JSON forms; coefficients are in graded-lex order.
Json poly_basis_to_json(const PolyBasis& b);
PolyBasis poly_basis_from_json(const Json& j);
Json poly_to_json(const Poly& p);
Poly poly_from_json(const Json& j);
Json field_to_json(const VectorField& f);
VectorField field_from_json(const Json& j);

Json gram_to_json(const GramCertificate& g);
GramCertificate gram_from_json(const Json& j, int side);

Json model_to_json(const LearnedModel& m);
LearnedModel model_from_json(const Json& j);

void save_model(const std::string& path, const LearnedModel& m);
LearnedModel load_model(const std::string& path);

/// Re-runs certificate verification from the model contents alone (exact
/// polynomial arithmetic, no solver).
struct ReverifyResult {
  bool verified = false;
  GramCertificate gram_lyap;
  GramCertificate gram_coercive;
};
ReverifyResult reverify_model(const LearnedModel& m, const VerifyOptions& opts = {});

// CSV formats: trajectory header "t,x1,...,xn"; dataset header
// "x1..xn,y1..yn,w".
void write_trajectory_csv(const std::string& path, const Trajectory& t);
Trajectory read_trajectory_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& d);
Dataset read_dataset_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::string& header = "");
Mat read_matrix_csv(const std::string& path);

/// Snapshot container: magic "SILASNAP", little-endian u64 header length,
/// JSON header {grid, times, fields}, then float64 payload stored
/// time-major as (r values, s values) per snapshot.
void write_snapshots(const std::string& path, const SnapshotMatrix& s);
SnapshotMatrix read_snapshots(const std::string& path);

/// FNV-1a 64-bit content hash (provenance, not cryptographic).
std::uint64_t fnv1a(const void* data, std::size_t len);
std::string file_hash_hex(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace silas
