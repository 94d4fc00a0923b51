#include "rhpe/problem_io.hpp"

#include "rhpe/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rhpe {

namespace {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) throw Error(Errc::invalid_input, "NaN cannot be serialized");
  return v > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(Errc::invalid_input, "expected a number, got " + j.dump());
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Vector read_vector(const json& j, Index n, const char* field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n) {
    throw Error(Errc::invalid_input, std::string("field '") + field + "' must be an array of " +
                                         std::to_string(n) + " numbers");
  }
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = read_number(j[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

std::string problem_to_json(const ProblemInstance& problem) {
  const Index n = problem.dim();
  json j;
  j["name"] = problem.name;
  j["n"] = n;
  json m = json::array();
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) m.push_back(number(problem.m(r, c)));
  }
  j["M"] = std::move(m);
  j["q"] = vector_json(problem.q);
  json con;
  con["type"] = to_string(problem.constraint.kind);
  if (problem.constraint.kind == ConstraintKind::box) {
    con["lo"] = vector_json(problem.constraint.lo);
    con["hi"] = vector_json(problem.constraint.hi);
  } else if (problem.constraint.kind == ConstraintKind::l1) {
    con["alpha"] = number(problem.constraint.alpha);
  }
  j["constraint"] = std::move(con);
  j["known_solution"] = problem.known_solution ? vector_json(*problem.known_solution) : json();
  if (problem.start) j["x0"] = vector_json(*problem.start);
  return j.dump(2);
}

ProblemInstance problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed problem JSON: ") + e.what());
  }
  try {
    const Index n = j.at("n").get<Index>();
    if (n < 1) throw Error(Errc::invalid_input, "n must be >= 1");
    const json& mj = j.at("M");
    if (!mj.is_array() || static_cast<Index>(mj.size()) != n * n) {
      throw Error(Errc::invalid_input, "field 'M' must hold n*n numbers");
    }
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) m(r, c) = read_number(mj[static_cast<std::size_t>(r * n + c)]);
    }
    Vector q = read_vector(j.at("q"), n, "q");

    Constraint con;
    const json& cj = j.at("constraint");
    const auto type = cj.at("type").get<std::string>();
    if (type == "none") {
      con.kind = ConstraintKind::none;
    } else if (type == "box") {
      con.kind = ConstraintKind::box;
      con.lo = read_vector(cj.at("lo"), n, "lo");
      con.hi = read_vector(cj.at("hi"), n, "hi");
    } else if (type == "l1") {
      con.kind = ConstraintKind::l1;
      con.alpha = read_number(cj.at("alpha"));
    } else {
      throw Error(Errc::invalid_input, "unknown constraint type '" + type + "'");
    }

    std::optional<Vector> known;
    if (j.contains("known_solution") && !j["known_solution"].is_null()) {
      known = read_vector(j["known_solution"], n, "known_solution");
    }
    ProblemInstance p = make_affine_instance(j.value("name", std::string("unnamed")), std::move(m),
                                             std::move(q), std::move(con), std::move(known));
    if (j.contains("x0") && !j["x0"].is_null()) p.start = read_vector(j["x0"], n, "x0");
    return p;
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_input, std::string("invalid problem JSON: ") + e.what());
  }
}

ProblemInstance load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

void save_problem(const ProblemInstance& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << problem_to_json(problem) << '\n';
}

}  // namespace rhpe
