#include "dhdae/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace dhdae {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j)
      row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw IoError("matrix: expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  ComplexMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(i);
    if (static_cast<Index>(row.size()) != cols)
      throw IoError("matrix: ragged rows");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row.at(c);
      if (!e.is_array() || e.size() != 2)
        throw IoError("matrix: entries must be [re, im] pairs");
      M(i, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return M;
}

json system_to_json(const LoadedSystem& s) {
  json j;
  j["n"] = s.E.rows();
  j["E"] = matrix_to_json(s.E);
  j["J"] = matrix_to_json(s.J);
  j["R"] = matrix_to_json(s.R);
  if (s.Q) j["Q"] = matrix_to_json(*s.Q);
  return j;
}

LoadedSystem system_from_json(const json& j) {
  LoadedSystem s;
  if (!j.contains("n") || !j.contains("E") || !j.contains("J") ||
      !j.contains("R"))
    throw IoError("system: fields n, E, J, R are required");
  const Index n = j.at("n").get<Index>();
  s.E = matrix_from_json(j.at("E"));
  s.J = matrix_from_json(j.at("J"));
  s.R = matrix_from_json(j.at("R"));
  if (j.contains("Q")) s.Q = matrix_from_json(j.at("Q"));
  for (const ComplexMatrix* M : {&s.E, &s.J, &s.R})
    if (M->rows() != n || M->cols() != n)
      throw IoError("system: matrix size disagrees with n");
  if (s.Q && (s.Q->rows() != n || s.Q->cols() != n))
    throw IoError("system: Q size disagrees with n");
  return s;
}

namespace {

Eigen::MatrixXd read_mm_array(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw IoError(path + ": missing MatrixMarket header");
  {
    std::istringstream hs(line);
    std::string tag, object, format, field, symmetry;
    hs >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "array" || field != "real" ||
        symmetry != "general")
      throw IoError(path + ": expected 'matrix array real general'");
  }
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  Index rows = 0, cols = 0;
  {
    std::istringstream ds(line);
    if (!(ds >> rows >> cols)) throw IoError(path + ": bad dimension line");
  }
  Eigen::MatrixXd M(rows, cols);
  for (Index c = 0; c < cols; ++c)  // array format is column-major
    for (Index r = 0; r < rows; ++r)
      if (!(in >> M(r, c))) throw IoError(path + ": truncated data");
  return M;
}

void write_mm_array(const std::string& path, const Eigen::MatrixXd& M) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << M.rows() << " " << M.cols() << "\n";
  out.precision(17);
  for (Index c = 0; c < M.cols(); ++c)
    for (Index r = 0; r < M.rows(); ++r) out << M(r, c) << "\n";
}

ComplexMatrix read_mm_pair(const std::string& prefix, const std::string& name) {
  const std::string re = prefix + "." + name + ".re.mtx";
  const std::string im = prefix + "." + name + ".im.mtx";
  const Eigen::MatrixXd Mre = read_mm_array(re);
  ComplexMatrix M = Mre.cast<Complex>();
  if (std::filesystem::exists(im)) {
    const Eigen::MatrixXd Mim = read_mm_array(im);
    if (Mim.rows() != Mre.rows() || Mim.cols() != Mre.cols())
      throw IoError(prefix + ": real/imag parts of " + name + " disagree");
    M += Complex(0, 1) * Mim.cast<Complex>();
  }
  return M;
}

}  // namespace

LoadedSystem read_system_file(const std::string& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw IoError(path + ": " + e.what());
    }
    try {
      return system_from_json(j);
    } catch (const json::exception& e) {
      throw IoError(path + ": " + e.what());
    }
  }
  if (std::filesystem::exists(path + ".E.re.mtx")) {
    LoadedSystem s;
    s.E = read_mm_pair(path, "E");
    s.J = read_mm_pair(path, "J");
    s.R = read_mm_pair(path, "R");
    if (std::filesystem::exists(path + ".Q.re.mtx"))
      s.Q = read_mm_pair(path, "Q");
    return s;
  }
  throw IoError("no such input: " + path + " (neither a JSON file nor a " +
                path + ".E.re.mtx prefix)");
}

void write_system_json(const std::string& path, const LoadedSystem& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << system_to_json(s).dump(2) << "\n";
}

void write_system_mtx(const std::string& prefix, const LoadedSystem& s) {
  auto split = [&](const ComplexMatrix& M, const std::string& name) {
    write_mm_array(prefix + "." + name + ".re.mtx", M.real());
    write_mm_array(prefix + "." + name + ".im.mtx", M.imag());
  };
  split(s.E, "E");
  split(s.J, "J");
  split(s.R, "R");
  if (s.Q) split(*s.Q, "Q");
}

DhdaeSystem to_validated(const LoadedSystem& s, double tol) {
  if (s.Q) {
    const auto gen = GeneralizedDhdae::validate(s.E, s.J, s.R, *s.Q, tol);
    return reduce_q(gen);
  }
  return DhdaeSystem::validate(s.E, s.J, s.R, tol);
}

namespace {

const char* tag_name(SetTag t) {
  switch (t) {
    case SetTag::Sd: return "sd";
    case SetTag::Si: return "si";
    case SetTag::SdJR: return "sd_jr";
    case SetTag::SiJR: return "si_jr";
  }
  return "?";
}

SetTag tag_from(const std::string& s) {
  if (s == "sd") return SetTag::Sd;
  if (s == "si") return SetTag::Si;
  if (s == "sd_jr") return SetTag::SdJR;
  if (s == "si_jr") return SetTag::SiJR;
  throw IoError("unknown perturbation set tag: " + s);
}

json value_or_inf(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

}  // namespace

json perturbation_to_json(const PerturbationTriple& p) {
  json j;
  j["set"] = tag_name(p.set_tag);
  j["norm"] = p.norm;
  j["dE"] = matrix_to_json(p.dE);
  j["dJ"] = matrix_to_json(p.dJ);
  j["dR"] = matrix_to_json(p.dR);
  return j;
}

PerturbationTriple perturbation_from_json(const json& j) {
  const ComplexMatrix dE = matrix_from_json(j.at("dE"));
  const ComplexMatrix dJ = matrix_from_json(j.at("dJ"));
  const ComplexMatrix dR = matrix_from_json(j.at("dR"));
  return make_perturbation(dE, dJ, dR, tag_from(j.at("set").get<std::string>()));
}

PerturbationTriple read_perturbation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
    return perturbation_from_json(j);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_perturbation_file(const std::string& path,
                             const PerturbationTriple& p) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << perturbation_to_json(p).dump(2) << "\n";
}

json verdict_to_json(const StabilityVerdict& v) {
  json j;
  j["schema"] = kReportSchema;
  j["kind"] = "verdict";
  j["robustly_stable"] = v.robustly_stable();
  j["regular"] = v.regular;
  j["index"] = v.index;
  j["spectral_abscissa"] = v.spectral_abscissa == -std::numeric_limits<double>::infinity()
                               ? json("-inf")
                               : json(v.spectral_abscissa);
  j["cond_a"] = v.cond_a;
  j["cond_b"] = v.cond_b;
  j["cond_c"] = v.cond_c;
  j["principal_submatrix_ok"] = v.principal_submatrix_ok;
  j["principal_check_exact"] = v.principal_check_exact;
  j["staircase_sizes"] = v.staircase_sizes;
  json b;
  if (v.d_dae) b["d_dae"] = *v.d_dae;
  if (v.d_sing_stack) b["d_sing_stack"] = *v.d_sing_stack;
  if (v.d_hi_lower) b["d_hi_lower"] = *v.d_hi_lower;
  if (v.d_r) b["d_r"] = *v.d_r;
  j["bounds"] = std::move(b);
  return j;
}

namespace {

json report_common(double value, BoundKind bk, Scope scope,
                   const std::optional<PerturbationTriple>& witness,
                   bool verified) {
  json j;
  j["schema"] = kReportSchema;
  j["value"] = value_or_inf(value);
  j["bound_kind"] = to_string(bk);
  j["scope"] = to_string(scope);
  j["witness_verified"] = verified;
  if (witness) j["witness"] = perturbation_to_json(*witness);
  return j;
}

}  // namespace

json report_to_json(const ImDistanceReport& r) {
  json j = report_common(r.value, r.bound_kind, r.scope, r.witness,
                         r.witness_verified);
  j["kind"] = "im";
  j["set"] = tag_name(r.set_tag);
  j["omega_star"] = r.omega_star;
  j["branch"] = r.branch == ImBranch::Lambda ? "lambda" : "generic";
  j["tight"] = r.tight;
  j["heuristic_search"] = r.heuristic_search;
  return j;
}

json report_to_json(const SingDistanceReport& r) {
  json j = report_common(r.value, r.bound_kind, r.scope, r.witness,
                         r.witness_verified);
  j["kind"] = "sing";
  j["set"] = r.set_tag ? json(tag_name(*r.set_tag)) : json("unstructured");
  if (r.kernel_vector) {
    json v = json::array();
    for (Index i = 0; i < r.kernel_vector->size(); ++i)
      v.push_back(json::array(
          {(*r.kernel_vector)(i).real(), (*r.kernel_vector)(i).imag()}));
    j["kernel_vector"] = std::move(v);
  }
  return j;
}

json report_to_json(const HiDistanceReport& r) {
  json j = report_common(r.value, r.bound_kind, r.scope, r.witness,
                         r.witness_verified);
  j["kind"] = "hi";
  j["set"] = tag_name(r.set_tag);
  j["k_star"] = r.k_star;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Exact: return "exact";
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
  }
  return "?";
}

std::string to_string(Scope s) {
  return s == Scope::Full ? "full" : "jr";
}

}  // namespace dhdae
