#include "mvop/cli_reports.hpp"

#include "mvop/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

namespace mvop {

namespace {

constexpr int kMaxRunDegree = 200;

const std::vector<std::pair<Check, std::string_view>> kCheckNames{
    {Check::Orth, "orth"},     {Check::Norm, "norm"},     {Check::Recurrence, "recurrence"},
    {Check::Eigen, "eigen"},   {Check::Darboux, "darboux"}, {Check::Det, "det"},
    {Check::Reduce, "reduce"}, {Check::Symmetries, "symmetries"}};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::ConfigError, what); }

Json bound_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double bound_from(const Json& j, double infinite) {
    if (j.is_null()) return infinite;
    if (!j.is_number()) config_error("support bounds must be numbers or null");
    return j.get<double>();
}

Json weight_to_json(const ScalarWeightSpec& s) {
    Json j;
    j["family"] = std::string(to_string(s.family));
    switch (s.family) {
        case Family::HermiteShifted: j["b"] = s.b; break;
        case Family::Laguerre: j["alpha"] = s.alpha; break;
        case Family::Jacobi:
            j["alpha"] = s.alpha;
            j["beta"] = s.beta;
            break;
        case Family::CustomMoments:
            j["moments"] = s.moments;
            j["support"] = Json::array({bound_json(s.custom_support.lo), bound_json(s.custom_support.hi)});
            break;
    }
    j["scale"] = s.scale;
    return j;
}

void expect_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
}

double number(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) config_error(where + " needs '" + key + "'");
    if (!j.at(key).is_number()) config_error(std::string("'") + key + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

ScalarWeightSpec weight_from_json(const Json& j, std::size_t index) {
    const std::string where = "weights[" + std::to_string(index) + "]";
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        config_error(where + " needs a string 'family'");
    const auto family = j.at("family").get<std::string>();
    const double scale = j.contains("scale") ? number(j, "scale", where) : 1.0;
    if (family == "hermite") {
        expect_keys(j, {"family", "b", "scale"}, where);
        return ScalarWeightSpec::hermite(j.contains("b") ? number(j, "b", where) : 0.0, scale);
    }
    if (family == "laguerre") {
        expect_keys(j, {"family", "alpha", "scale"}, where);
        return ScalarWeightSpec::laguerre(number(j, "alpha", where), scale);
    }
    if (family == "jacobi") {
        expect_keys(j, {"family", "alpha", "beta", "scale"}, where);
        return ScalarWeightSpec::jacobi(number(j, "alpha", where), number(j, "beta", where), scale);
    }
    if (family == "custom") {
        expect_keys(j, {"family", "moments", "support", "scale"}, where);
        if (!j.contains("moments") || !j.at("moments").is_array()) config_error(where + " needs a 'moments' array");
        std::vector<double> moments;
        for (const auto& m : j.at("moments")) {
            if (!m.is_number()) config_error(where + " moments must be numbers");
            moments.push_back(m.get<double>());
        }
        Interval support;
        if (j.contains("support")) {
            const auto& s = j.at("support");
            if (!s.is_array() || s.size() != 2) config_error(where + " 'support' must be [lo, hi]");
            support = {bound_from(s[0], -std::numeric_limits<double>::infinity()),
                       bound_from(s[1], std::numeric_limits<double>::infinity())};
        }
        auto w = ScalarWeightSpec::custom(std::move(moments), support);
        w.scale = scale;
        return w;
    }
    config_error(where + " has unknown family '" + family + "'");
}

bool is_builtin_n5(const WeightSpec& spec) {
    if (spec.N != 5 || spec.scalars[0].family != Family::Laguerre) return false;
    try {
        return builtin_n5_laguerre<Complex>(spec.scalars[0].alpha, spec.a_params).spec == spec;
    } catch (const Error&) {
        return false;
    }
}

bool is_equal_hermite(const WeightSpec& spec) {
    return std::all_of(spec.scalars.begin(), spec.scalars.end(),
                       [](const ScalarWeightSpec& s) { return s == ScalarWeightSpec::hermite(); });
}

template <class T>
double rel(const Matrix<T>& a, const Matrix<T>& b) {
    return frobenius<T>(Matrix<T>(a - b)) / std::max(frobenius<T>(b), 1e-300);
}

template <class T>
double rel(const T& a, const T& b) {
    return magnitude(T(a - b)) / std::max(magnitude(b), 1e-300);
}

template <class R>
Json poly_json(const Polynomial<R>& p) {
    Json j = Json::array();
    for (const auto& c : p.coeffs()) {
        if constexpr (is_exact_v<R>) {
            j.push_back(c.str());
        } else {
            j.push_back(c);
        }
    }
    return j;
}

template <class T>
Json scalar_json(const T& v) {
    if constexpr (is_exact_v<T>) {
        return v.str();
    } else {
        if (v.imag() == 0.0) return v.real();
        return Json::array({v.real(), v.imag()});
    }
}

template <class T>
CheckResult run_check(Check check, const RunConfig& cfg, const MVOPSequence<T>& seq) {
    CheckResult r;
    r.check = check;
    const auto& spec = cfg.spec;
    const int n_max = cfg.n_max;
    Json& d = r.details;
    switch (check) {
        case Check::Orth: {
            const auto rep = seq.verify_orthogonality(n_max, cfg.tol);
            r.pass = rep.pass;
            r.worst = rep.worst;
            d = orthogonality_json(rep);
            break;
        }
        case Check::Norm: {
            d["per_n"] = Json::array();
            for (int n = 0; n <= n_max; ++n) {
                const double e = rel<T>(seq.gram(n, n), seq.squared_norm_Q(n));
                r.worst = std::max(r.worst, e);
                d["per_n"].push_back({{"n", n}, {"relative_error", e}});
            }
            r.pass = r.worst <= cfg.tol;
            break;
        }
        case Check::Recurrence: {
            d["per_n"] = Json::array();
            for (int n = 1; n <= n_max; ++n) {
                const auto tt = seq.three_term_coefficients(n);
                r.worst = std::max(r.worst, tt.residual);
                d["per_n"].push_back({{"n", n},
                                      {"A", matrix_json<T>(tt.A)},
                                      {"B", matrix_json<T>(tt.B)},
                                      {"C", matrix_json<T>(tt.C)},
                                      {"residual", tt.residual}});
            }
            r.pass = r.worst <= cfg.tol;
            break;
        }
        case Check::Eigen: {
            const auto bi = build_bispectral_operator<T>(spec);
            const auto rep = eigencheck(seq, bi.D, bi.Lambda, n_max, cfg.tol);
            r.pass = rep.pass;
            r.worst = rep.worst;
            d = eigen_report_json(rep);
            d["family"] = std::string(to_string(bispectral_family(spec)));
            d["operator"] = operator_json(bi.D);
            d["eigenvalues"] = Json::array();
            for (const auto& s : bi.Lambda.slots) d["eigenvalues"].push_back(poly_json(s));
            break;
        }
        case Check::Darboux: {
            const auto D1 = is_equal_hermite(spec) ? hermite_A_factorization<T>(spec).D1
                                                   : builtin_n5_laguerre<T>(spec.scalars[0].alpha, spec.a_params).D1;
            const auto rep = darboux_verify(seq, D1, n_max, cfg.tol);
            r.pass = rep.pass;
            r.worst = rep.worst;
            d = darboux_json(rep);
            d["factorization"] = is_equal_hermite(spec) ? "hermite-A" : "laguerre-five";
            break;
        }
        case Check::Det: {
            d["per_n"] = Json::array();
            for (int n = 1; n <= n_max; ++n) {
                const auto lc = seq.leading_coeff_det(n);
                const double e = std::max(rel<T>(lc.det_continuant, lc.det_direct), rel<T>(lc.det_matrix, lc.det_direct));
                r.worst = std::max(r.worst, e);
                d["per_n"].push_back({{"n", n},
                                      {"det", scalar_json<T>(lc.det_direct)},
                                      {"continuant", scalar_json<T>(lc.det_continuant)},
                                      {"relative_error", e}});
            }
            r.pass = r.worst <= cfg.tol;
            break;
        }
        case Check::Reduce: {
            if (spec.N == 2) {
                const auto red = try_reduce_2x2(spec);
                const auto deg = ratio_polynomial_degree(spec.scalars[0], spec.scalars[1]);
                d["ratio_polynomial_degree"] = deg ? Json(*deg) : Json(nullptr);
                d["reducible"] = red.has_value();
                if (red) {
                    d["b"] = red->b;
                    d["c"] = red->c;
                    d["M"] = matrix_json<Complex>(red->M.cast<Complex>());
                    d["diagonal_residual"] = red->diagonal_residual;
                    d["reduced_form"] = red->reduced_form;
                    r.worst = red->diagonal_residual;
                }
            } else if (spec.scalars[0] == spec.scalars[2]) {
                const auto red = try_reduce_3x3_w1w3(spec);
                d["reducible"] = true;
                d["M"] = matrix_json<Complex>(red.M.cast<Complex>());
                d["residual"] = red.residual;
                d["reduced_form"] = red.reduced_form;
                r.worst = red.residual;
            } else {
                d["reducible"] = nullptr;
                d["note"] = "no explicit reduction applies when w1 != w3";
            }
            r.pass = r.worst <= 1e-10;
            break;
        }
        case Check::Symmetries: {
            const int points = cfg.symmetry_points > 0 ? cfg.symmetry_points : 4 * spec.N * spec.N + 8;
            const auto s = order_zero_symmetries(spec, points);
            r.pass = s.verified;
            r.worst = s.verify_residual;
            d = symmetry_json(s);
            break;
        }
    }
    return r;
}

void write_csv(const std::string& dir, const std::string& name, const std::string& body) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot write " + path.string());
    f << body;
    if (!f) fail(ErrorCode::IoError, "failed writing " + path.string());
}

template <class T>
std::vector<CheckResult> run_all(const RunConfig& cfg) {
    const MVOPSequence<T> seq(cfg.spec, cfg.n_max + 2);
    std::vector<CheckResult> results(cfg.checks.size());
    parallel_for(static_cast<int>(cfg.checks.size()), [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            results[k] = run_check<T>(cfg.checks[k], cfg, seq);
        } catch (const Error& e) {
            results[k].check = cfg.checks[k];
            results[k].pass = false;
            results[k].error = e.what();
        }
    });
    if (!cfg.csv_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.csv_dir, ec);
        if (ec) fail(ErrorCode::IoError, "cannot create " + cfg.csv_dir + ": " + ec.message());
        for (int n = 0; n <= cfg.n_max; ++n) {
            write_csv(cfg.csv_dir, "Q_" + std::to_string(n) + ".csv", to_csv(seq.build_Q(n)));
            write_csv(cfg.csv_dir, "gram_" + std::to_string(n) + ".csv",
                      to_csv(MatrixPolynomial<T>::constant(seq.gram(n, n))));
        }
    }
    return results;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::Float ? "float" : "exact"; }

std::string_view to_string(Check c) {
    for (const auto& [k, name] : kCheckNames)
        if (k == c) return name;
    return "unknown";
}

void RunConfig::validate() const {
    try {
        spec.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    if (n_max < 0 || n_max > kMaxRunDegree) config_error("n_max must lie in [0, " + std::to_string(kMaxRunDegree) + "]");
    if (!(tol > 0.0)) config_error("tol must be positive");
    if (symmetry_points < 0) config_error("symmetry_points must be nonnegative");
    if (backend == Backend::Exact) {
        try {
            InnerProductEngine<Rational> probe(spec);
        } catch (const Error& e) {
            config_error(std::string("exact backend unavailable: ") + e.what());
        }
    }
    for (Check c : checks) {
        switch (c) {
            case Check::Eigen:
                try {
                    build_bispectral_operator<Complex>(spec);
                } catch (const Error& e) {
                    config_error("check 'eigen' does not apply: " + std::string(e.what()));
                }
                break;
            case Check::Darboux:
                if (!is_equal_hermite(spec) && !is_builtin_n5(spec))
                    config_error("check 'darboux' needs equal weights e^{-x^2} or the five-weight Laguerre chain");
                break;
            case Check::Reduce:
                if (spec.N != 2 && spec.N != 3) config_error("check 'reduce' needs N = 2 or N = 3");
                break;
            case Check::Symmetries:
                for (const auto& s : spec.scalars)
                    if (!s.is_classical()) config_error("check 'symmetries' needs classical weights");
                break;
            default: break;
        }
    }
}

Json config_to_json(const RunConfig& cfg) {
    Json j;
    j["size"] = cfg.spec.N;
    j["a"] = cfg.spec.a_params;
    j["weights"] = Json::array();
    for (const auto& s : cfg.spec.scalars) j["weights"].push_back(weight_to_json(s));
    j["backend"] = std::string(to_string(cfg.backend));
    j["n_max"] = cfg.n_max;
    j["tol"] = cfg.tol;
    j["checks"] = Json::array();
    for (Check c : cfg.checks) j["checks"].push_back(std::string(to_string(c)));
    j["symmetry_points"] = cfg.symmetry_points;
    j["out"] = cfg.out;
    j["csv_dir"] = cfg.csv_dir;
    return j;
}

RunConfig config_from_json(const Json& j) {
    expect_keys(j, {"size", "a", "weights", "backend", "n_max", "tol", "checks", "symmetry_points", "out", "csv_dir"},
                "config");
    RunConfig cfg;
    try {
        if (!j.contains("size") || !j.at("size").is_number_integer()) config_error("config needs an integer 'size'");
        cfg.spec.N = j.at("size").get<int>();
        if (!j.contains("a") || !j.at("a").is_array()) config_error("config needs an 'a' array");
        for (const auto& v : j.at("a")) {
            if (!v.is_number()) config_error("'a' entries must be numbers");
            cfg.spec.a_params.push_back(v.get<double>());
        }
        if (!j.contains("weights") || !j.at("weights").is_array()) config_error("config needs a 'weights' array");
        for (std::size_t i = 0; i < j.at("weights").size(); ++i)
            cfg.spec.scalars.push_back(weight_from_json(j.at("weights")[i], i));
        if (j.contains("backend")) {
            const auto b = j.at("backend").get<std::string>();
            if (b == "float") cfg.backend = Backend::Float;
            else if (b == "exact") cfg.backend = Backend::Exact;
            else config_error("backend must be 'float' or 'exact'");
        }
        if (j.contains("n_max")) {
            if (!j.at("n_max").is_number_integer()) config_error("'n_max' must be an integer");
            cfg.n_max = j.at("n_max").get<int>();
        }
        if (j.contains("tol")) cfg.tol = number(j, "tol", "config");
        if (j.contains("checks")) {
            if (!j.at("checks").is_array()) config_error("'checks' must be an array");
            for (const auto& c : j.at("checks")) {
                const auto name = c.get<std::string>();
                const auto it = std::find_if(kCheckNames.begin(), kCheckNames.end(),
                                             [&](const auto& p) { return p.second == name; });
                if (it == kCheckNames.end()) config_error("unknown check '" + name + "'");
                cfg.checks.push_back(it->first);
            }
        }
        if (j.contains("symmetry_points")) cfg.symmetry_points = j.at("symmetry_points").get<int>();
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("csv_dir")) cfg.csv_dir = j.at("csv_dir").get<std::string>();
    } catch (const Json::exception& e) {
        config_error(e.what());
    }
    cfg.validate();
    return cfg;
}

std::string config_schema() {
    const Json weight = {
        {"type", "object"},
        {"required", {"family"}},
        {"additionalProperties", false},
        {"properties",
         {{"family", {{"enum", {"hermite", "laguerre", "jacobi", "custom"}}}},
          {"b", {{"type", "number"}}},
          {"alpha", {{"type", "number"}, {"exclusiveMinimum", -1}}},
          {"beta", {{"type", "number"}, {"exclusiveMinimum", -1}}},
          {"moments", {{"type", "array"}, {"items", {{"type", "number"}}}}},
          {"support", {{"type", "array"}, {"minItems", 2}, {"maxItems", 2}, {"items", {{"type", {"number", "null"}}}}}},
          {"scale", {{"type", "number"}, {"exclusiveMinimum", 0}}}}}};
    std::vector<std::string> checks;
    for (const auto& [c, name] : kCheckNames) checks.emplace_back(name);
    const Json schema = {
        {"$schema", "http://json-schema.org/draft-07/schema#"},
        {"title", "mvop run configuration"},
        {"type", "object"},
        {"required", {"size", "a", "weights"}},
        {"additionalProperties", false},
        {"properties",
         {{"size", {{"type", "integer"}, {"minimum", 1}}},
          {"a", {{"type", "array"}, {"items", {{"type", "number"}, {"not", {{"const", 0}}}}}}},
          {"weights", {{"type", "array"}, {"items", weight}}},
          {"backend", {{"enum", {"float", "exact"}}, {"default", "float"}}},
          {"n_max", {{"type", "integer"}, {"minimum", 0}, {"maximum", kMaxRunDegree}, {"default", 10}}},
          {"tol", {{"type", "number"}, {"exclusiveMinimum", 0}, {"default", 1e-9}}},
          {"checks", {{"type", "array"}, {"items", {{"enum", checks}}}}},
          {"symmetry_points", {{"type", "integer"}, {"minimum", 0}, {"default", 0}}},
          {"out", {{"type", "string"}}},
          {"csv_dir", {{"type", "string"}}}}}};
    return schema.dump(2);
}

Json RunReport::to_json() const {
    Json j;
    j["pass"] = pass;
    j["wall_seconds"] = wall_seconds;
    j["config"] = config_to_json(config);
    j["checks"] = Json::array();
    for (const auto& r : results) {
        Json c;
        c["name"] = std::string(to_string(r.check));
        c["pass"] = r.pass;
        c["worst"] = r.worst;
        if (!r.error.empty()) c["error"] = r.error;
        if (!r.details.is_null()) c["details"] = r.details;
        j["checks"].push_back(std::move(c));
    }
    return j;
}

RunReport run(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config = cfg;
    rep.results = cfg.backend == Backend::Exact ? run_all<Rational>(cfg) : run_all<Complex>(cfg);
    rep.pass = std::all_of(rep.results.begin(), rep.results.end(), [](const CheckResult& r) { return r.pass; });
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.out.empty()) {
        std::ofstream f(cfg.out);
        if (!f) fail(ErrorCode::IoError, "cannot write " + cfg.out);
        f << rep.to_json().dump(2) << '\n';
        if (!f) fail(ErrorCode::IoError, "failed writing " + cfg.out);
    }
    return rep;
}

template <class T>
Json matrix_json(const Matrix<T>& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(scalar_json<T>(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class T>
Json operator_json(const MatrixDiffOperator<T>& op) {
    Json F = Json::array();
    for (const auto& f : op.coeffs()) {
        Json powers = Json::array();
        for (const auto& c : f.coeffs()) powers.push_back(matrix_json<T>(c));
        F.push_back(std::move(powers));
    }
    return {{"order", op.order()}, {"F", std::move(F)}};
}

Json eigen_report_json(const EigenReport& r) {
    return {{"n_max", r.n_max}, {"tol", r.tol},   {"worst", r.worst},
            {"worst_n", r.worst_n}, {"pass", r.pass}, {"residuals", r.residuals}};
}

Json orthogonality_json(const OrthogonalityReport& r) {
    return {{"n_max", r.n_max}, {"tol", r.tol},          {"worst", r.worst},
            {"worst_n", r.worst_n}, {"worst_m", r.worst_m}, {"pass", r.pass}};
}

Json darboux_json(const DarbouxReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"n", e.n},
                           {"residual", e.residual},
                           {"nonsingular", e.nonsingular},
                           {"det_abs", e.det_abs},
                           {"A_n", matrix_json<Complex>(e.A_n)}});
    return {{"n_max", r.n_max},   {"tol", r.tol},   {"worst", r.worst},          {"worst_n", r.worst_n},
            {"singular_count", r.singular_count}, {"pass", r.pass}, {"entries", std::move(entries)}};
}

Json symmetry_json(const SymmetrySpace& s) {
    Json basis = Json::array();
    for (const auto& b : s.basis) basis.push_back(matrix_json<Complex>(b));
    return {{"dimension", s.dimension},
            {"only_scalar", s.only_scalar()},
            {"scope", "order-zero symmetries F W = W F^* only"},
            {"sample_points", s.sample_points.size()},
            {"verify_residual", s.verify_residual},
            {"verified", s.verified},
            {"singular_values", s.singular_values},
            {"basis", std::move(basis)}};
}

template Json matrix_json<Complex>(const Matrix<Complex>&);
template Json matrix_json<Rational>(const Matrix<Rational>&);
template Json operator_json<Complex>(const MatrixDiffOperator<Complex>&);
template Json operator_json<Rational>(const MatrixDiffOperator<Rational>&);

}  // namespace mvop
