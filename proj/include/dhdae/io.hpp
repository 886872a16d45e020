#ifndef DHDAE_IO_HPP
#define DHDAE_IO_HPP

#include "dhdae/distance_hi.hpp"
#include "dhdae/distance_im.hpp"
#include "dhdae/distance_sing.hpp"
#include "dhdae/model.hpp"
#include "dhdae/staircase.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace dhdae {

class IoError : public Error {
public:
  using Error::Error;
};

/// Raw coefficients as read from disk; Q present means the generalized
/// four-matrix form, to be reduced before analysis.
struct LoadedSystem {
  ComplexMatrix E, J, R;
  std::optional<ComplexMatrix> Q;
};

/// JSON schema: {"n": int, "E": [[[re, im], ...], ...], "J": ..., "R": ...,
/// optional "Q": ...}. Doubles round-trip bit-exactly through the shortest
/// decimal representation.
nlohmann::json system_to_json(const LoadedSystem& s);
LoadedSystem system_from_json(const nlohmann::json& j);

/// Reads `path` as JSON when that file exists; otherwise treats `path` as
/// a prefix for Matrix Market array pairs `<path>.E.re.mtx`/`.E.im.mtx`
/// (the .im.mtx files may be omitted for real data), same for J, R and an
/// optional Q.
LoadedSystem read_system_file(const std::string& path);
void write_system_json(const std::string& path, const LoadedSystem& s);
void write_system_mtx(const std::string& prefix, const LoadedSystem& s);

/// Validates the loaded coefficients, reducing the Q factor first when one
/// is present.
DhdaeSystem to_validated(const LoadedSystem& s, double tol = 1e-12);

nlohmann::json perturbation_to_json(const PerturbationTriple& p);
PerturbationTriple perturbation_from_json(const nlohmann::json& j);
PerturbationTriple read_perturbation_file(const std::string& path);
void write_perturbation_file(const std::string& path,
                             const PerturbationTriple& p);

/// Structured report output. Every bound carries its bound_kind so a lower
/// bound can never masquerade as an exact value downstream.
inline constexpr const char* kReportSchema = "dhdae-report/1";
nlohmann::json verdict_to_json(const StabilityVerdict& v);
nlohmann::json report_to_json(const ImDistanceReport& r);
nlohmann::json report_to_json(const SingDistanceReport& r);
nlohmann::json report_to_json(const HiDistanceReport& r);

nlohmann::json matrix_to_json(const ComplexMatrix& M);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace dhdae

#endif
