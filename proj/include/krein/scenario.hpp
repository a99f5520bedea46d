#pragma once

// Scenario files, seeded generation, the identity suite behind `check`, and
// M-function tabulation. JSON schema (version 1):
//
//   { "version": 1, "seed": S, "dimension": N, "deficiency": n,
//     "a1": [[[re, im], ...], ...],          // optional, N x N Hermitian
//     "nplus": [[[re, im], ...], ...],       // optional, N x n basis columns
//     "parameter": {"angle": M} | {"unitary": M},   // n x n
//     "z_grid": [[re, im], ...], "tolerance": T }
//
// A unitary parameter is the von Neumann coordinate matrix of U_{A2} in the
// model frame, where the parameter of A1 is the identity.

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "krein/extension.hpp"
#include "krein/halfline.hpp"
#include "krein/krein.hpp"
#include "krein/random.hpp"
#include "krein/report.hpp"

namespace krein {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kScenarioVersion = 1;
inline constexpr Index kMaxDimension = 64;
inline constexpr double kAngleClamp = 1.4;

using Json = nlohmann::json;

struct ExtensionSpec {
    enum class Kind { Angle, Unitary };
    Kind kind = Kind::Angle;
    ComplexMatrix value;
};

struct ScenarioFile {
    int version = kScenarioVersion;
    std::uint64_t seed = 0;
    Index dimension = 0;
    Index deficiency = 0;
    std::optional<ComplexMatrix> a1;
    std::optional<ComplexMatrix> nplus;
    ExtensionSpec parameter;
    std::vector<Complex> z_grid;
    double tolerance = kDefaultCheckTolerance;
};

// ---------------------------------------------------------------------------
// Complex literals and JSON encoding

/// Parses "a+bi", "-3i", "i", "2", "1e-3-2.5i".
inline Complex parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '\t')
            s.push_back(ch);
    auto fail = [&]() -> Error {
        return Error(ErrorKind::InvalidInput, "malformed complex literal '" + text + "'");
    };
    if (s.empty())
        throw fail();

    auto to_double = [&](const std::string& part) {
        if (part.empty() || part == "+")
            return 1.0;
        if (part == "-")
            return -1.0;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != part.size())
            throw fail();
        return v;
    };

    if (s.back() != 'i' && s.back() != 'j') {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != s.size())
            throw fail();
        return {v, 0.0};
    }
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos)
        return {0.0, to_double(body)};
    const std::string re = body.substr(0, split);
    if (re == "+" || re == "-")
        throw fail();
    return {to_double(re), to_double(body.substr(split))};
}

inline std::vector<Complex> parse_complex_list(const std::string& text) {
    std::vector<Complex> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_complex(item));
    if (out.empty())
        throw Error(ErrorKind::InvalidInput, "empty complex list");
    return out;
}

inline Json complex_to_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::InvalidInput, "complex numbers must be [re, im] arrays");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows)
        throw Error(ErrorKind::InvalidInput, what + ": expected " + std::to_string(rows) + " rows");
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw Error(ErrorKind::InvalidInput,
                        what + ": expected " + std::to_string(cols) + " columns");
        for (Index c = 0; c < cols; ++c)
            m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
    require_finite(m, what);
    return m;
}

// ---------------------------------------------------------------------------
// Scenario validation, generation, (de)serialization

inline std::vector<Complex> default_z_grid() {
    return {{1, 2},  {1, -2}, {-1, 2}, {-1, -2}, {2, 4},  {2, -4}, {-2, 4}, {-2, -4},
            {0, 1},  {0, -1}, {0, 2},  {0, -3},  {1, 1},  {1, -1}, {-1, 1}, {3, -1}};
}

inline void validate(const ScenarioFile& s) {
    auto bad = [](const std::string& what) { return Error(ErrorKind::BadDimensions, what); };
    if (s.version != kScenarioVersion)
        throw Error(ErrorKind::InvalidInput, "unsupported scenario version");
    if (s.deficiency < 1 || s.deficiency > s.dimension || s.dimension > kMaxDimension)
        throw bad("require 1 <= deficiency <= dimension <= 64");
    if (s.z_grid.empty())
        throw Error(ErrorKind::InvalidInput, "z_grid must be nonempty");
    for (Complex z : s.z_grid)
        if (z.imag() == 0.0 || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorKind::InvalidInput, "z_grid entries must be finite and nonreal");
    if (!(s.tolerance >= 1e-14 && s.tolerance <= 1e-3))
        throw Error(ErrorKind::InvalidInput, "tolerance must lie in [1e-14, 1e-3]");
    if (s.a1 && (s.a1->rows() != s.dimension || s.a1->cols() != s.dimension))
        throw bad("a1 must be N x N");
    if (s.nplus && (s.nplus->rows() != s.dimension || s.nplus->cols() != s.deficiency))
        throw bad("nplus must be N x n");
    if (s.parameter.value.rows() != s.deficiency || s.parameter.value.cols() != s.deficiency)
        throw bad("parameter must be n x n");
}

struct GeneratedParts {
    ComplexMatrix a1;
    ComplexMatrix nplus;
    ComplexMatrix angle;
};

/// Draw order is fixed (a1, then N+, then the angle) so that every part is a
/// function of (dim, deficiency, seed) alone.
inline GeneratedParts generate_parts(Index dim, Index deficiency, std::uint64_t seed) {
    SeededStream rng(seed);
    GeneratedParts p;
    p.a1 = rng.hermitian(dim);
    p.nplus = rng.unitary(dim).leftCols(deficiency);
    const SpectralDecomposition d = hermitian_eig(rng.hermitian(deficiency));
    p.angle = real_part(apply_function_normal(d, [](Complex x) {
        return Complex{std::clamp(x.real(), -kAngleClamp, kAngleClamp), 0.0};
    }));
    return p;
}

inline ScenarioFile generate_scenario(Index dim, Index deficiency, std::uint64_t seed) {
    if (deficiency < 1 || deficiency > dim || dim > kMaxDimension)
        throw Error(ErrorKind::BadDimensions, "require 1 <= deficiency <= dimension <= 64");
    GeneratedParts parts = generate_parts(dim, deficiency, seed);
    ScenarioFile s;
    s.seed = seed;
    s.dimension = dim;
    s.deficiency = deficiency;
    s.a1 = std::move(parts.a1);
    s.nplus = std::move(parts.nplus);
    s.parameter = {ExtensionSpec::Kind::Angle, std::move(parts.angle)};
    s.z_grid = default_z_grid();
    s.tolerance = kDefaultCheckTolerance;
    return s;
}

inline Json scenario_to_json(const ScenarioFile& s) {
    Json j;
    j["version"] = s.version;
    j["seed"] = s.seed;
    j["dimension"] = s.dimension;
    j["deficiency"] = s.deficiency;
    if (s.a1)
        j["a1"] = matrix_to_json(*s.a1);
    if (s.nplus)
        j["nplus"] = matrix_to_json(*s.nplus);
    Json param;
    param[s.parameter.kind == ExtensionSpec::Kind::Angle ? "angle" : "unitary"] =
        matrix_to_json(s.parameter.value);
    j["parameter"] = std::move(param);
    Json grid = Json::array();
    for (Complex z : s.z_grid)
        grid.push_back(complex_to_json(z));
    j["z_grid"] = std::move(grid);
    j["tolerance"] = s.tolerance;
    return j;
}

inline ScenarioFile scenario_from_json(const Json& j) {
    try {
        if (!j.is_object())
            throw Error(ErrorKind::InvalidInput, "scenario must be a JSON object");
        ScenarioFile s;
        if (!j.contains("version"))
            throw Error(ErrorKind::InvalidInput, "missing mandatory field 'version'");
        s.version = j.at("version").get<int>();
        s.seed = j.value("seed", std::uint64_t{0});
        s.dimension = j.at("dimension").get<Index>();
        s.deficiency = j.at("deficiency").get<Index>();
        if (s.deficiency < 1 || s.deficiency > s.dimension || s.dimension > kMaxDimension)
            throw Error(ErrorKind::BadDimensions, "require 1 <= deficiency <= dimension <= 64");
        if (j.contains("a1"))
            s.a1 = matrix_from_json(j.at("a1"), s.dimension, s.dimension, "a1");
        if (j.contains("nplus"))
            s.nplus = matrix_from_json(j.at("nplus"), s.dimension, s.deficiency, "nplus");
        const Json& param = j.at("parameter");
        if (!param.is_object() || param.size() != 1)
            throw Error(ErrorKind::InvalidInput, "parameter must hold exactly one of angle/unitary");
        if (param.contains("angle"))
            s.parameter = {ExtensionSpec::Kind::Angle,
                           matrix_from_json(param.at("angle"), s.deficiency, s.deficiency, "angle")};
        else if (param.contains("unitary"))
            s.parameter = {ExtensionSpec::Kind::Unitary, matrix_from_json(param.at("unitary"),
                                                                          s.deficiency, s.deficiency,
                                                                          "unitary")};
        else
            throw Error(ErrorKind::InvalidInput, "parameter must hold angle or unitary");
        for (const Json& z : j.at("z_grid"))
            s.z_grid.push_back(complex_from_json(z));
        s.tolerance = j.at("tolerance").get<double>();
        validate(s);
        return s;
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, e.what());
    }
}

inline ScenarioFile parse_scenario(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::InvalidInput, e.what());
    }
    return scenario_from_json(j);
}

inline std::string serialize_scenario(const ScenarioFile& s) {
    return scenario_to_json(s).dump(2) + "\n";
}

/// FNV-1a 64 of the canonical (compact) JSON form, as hex.
inline std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k, h >>= 4)
        out[static_cast<std::size_t>(k)] = digits[h & 0xf];
    return out;
}

inline std::string scenario_hash(const ScenarioFile& s) {
    return content_hash(scenario_to_json(s).dump());
}

inline ComplexMatrix resolved_a1(const ScenarioFile& s) {
    return s.a1 ? *s.a1 : generate_parts(s.dimension, s.deficiency, s.seed).a1;
}

inline ComplexMatrix resolved_nplus(const ScenarioFile& s) {
    return s.nplus ? *s.nplus : generate_parts(s.dimension, s.deficiency, s.seed).nplus;
}

inline ExtensionParameter resolved_parameter(const ScenarioFile& s) {
    if (s.parameter.kind == ExtensionSpec::Kind::Angle)
        return ExtensionParameter::from_angle(s.parameter.value);
    return {s.parameter.value};
}

// ---------------------------------------------------------------------------
// Identity suite

namespace detail {

inline double relative(double residual, double scale) {
    return residual / (1.0 + scale);
}

inline const std::vector<std::string>& suite_check_names() {
    static const std::vector<std::string> names = {
        "model.invariants",
        "extension.from_parameter",
        "extension.cayley_round_trip",
        "extension.deficiency_map",
        "extension.resolvent_identity",
        "extension.direct_sum",
        "extension.relative_primeness",
        "extension.common_plus_subspace",
        "extension.kernel_on_nminus",
        "krein.angle_operator",
        "krein.p_at_i_cayley",
        "krein.p_range_rank",
        "krein.tan_alpha_inversion",
        "krein.weyl_fixed_point",
        "krein.p_adjoint_symmetry",
        "krein.p_support",
        "krein.p_translation",
        "krein.p_invertible",
        "krein.p_inverse_weyl",
        "krein.weyl_symmetry",
        "krein.herglotz_bound",
        "krein.herglotz_identity",
        "krein.resolvent_formula",
        "krein.lft_direct",
        "krein.lft_third_extension",
        "krein.lft_cayley_identities",
        "krein.lft_angle_form",
        "krein.von_neumann_link",
    };
    return names;
}

/// Runs fn, turning any library error into a failed check.
template <class F>
void guarded(ReportBuilder& b, const std::string& name, F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        b.fail(name, e);
    } catch (const std::exception& e) {
        b.fail(name, "InternalError", e.what());
    }
}

} // namespace detail

inline Report run_checks(const ScenarioFile& scenario, std::optional<double> tol_override = {}) {
    using detail::guarded;
    using detail::relative;
    const double tol = tol_override.value_or(scenario.tolerance);
    ReportBuilder b(tol);
    for (const auto& name : detail::suite_check_names())
        b.record(name, 0.0);

    Report report;
    report.scenario_hash = scenario_hash(scenario);
    report.tool_version = kToolVersion;

    std::optional<RestrictionModel> model;
    std::optional<Extension> a2;
    ExtensionParameter param;
    try {
        model.emplace(build_model(resolved_a1(scenario), resolved_nplus(scenario)));
        param = resolved_parameter(scenario);
        a2.emplace(extension_from_parameter(*model, param));
    } catch (const Error& e) {
        for (const auto& name : detail::suite_check_names())
            b.fail(name, e);
        report.checks = b.finish();
        return report;
    }

    const Extension& a1 = model->a1;
    const Subspace& nplus = model->nplus;
    const Index n = model->n;
    const ComplexMatrix id_n = identity(n);
    const std::array<const Extension*, 2> extensions{&a1, &*a2};

    guarded(b, "model.invariants", [&] {
        const ModelResiduals r = model_residuals(*model);
        b.record("model.invariants",
                 relative(std::max(r.nminus_relation, r.domain_orthogonality), norm(a1.matrix())));
    });

    guarded(b, "extension.from_parameter", [&] {
        const double extends = relative(extension_defect(*model, *a2), norm(a2->matrix()));
        const double round_trip = norm(parameter_of(*model, *a2).v - param.v);
        const double unitary = unitary_defect(a2->cayley_transform());
        b.record("extension.from_parameter", std::max({extends, round_trip, unitary}));
    });

    for (const Extension* ext : extensions) {
        guarded(b, "extension.cayley_round_trip", [&] {
            const ComplexMatrix back = inverse_cayley(cayley(ext->matrix()));
            b.record("extension.cayley_round_trip",
                     relative(norm(back - ext->matrix()), norm(ext->matrix())));
        });
        guarded(b, "extension.deficiency_map", [&] {
            const Lemma1Report r = check_lemma1(*model, *ext);
            b.record("extension.deficiency_map", r.deficiency_map);
            b.record("extension.resolvent_identity", r.resolvent_identity);
            b.record("extension.direct_sum", r.direct_sum_exhausts ? 0.0 : 1.0);
        });
    }

    bool prime = false;
    std::optional<Subspace> common;
    guarded(b, "extension.relative_primeness", [&] {
        prime = is_relatively_prime(*model, a1, *a2);
        const Index rank = numerical_rank(resolvent_difference_at_i(a1, *a2));
        b.record("extension.relative_primeness", prime == (rank == n) ? 0.0 : 1.0);
        b.note("extension.relative_primeness", prime ? "prime" : "not prime");
    });

    guarded(b, "extension.common_plus_subspace", [&] {
        common.emplace(common_plus_subspace(a1, *a2));
        const ComplexMatrix& bc = common->basis();
        double residual = norm(bc - nplus.basis() * (nplus.basis().adjoint() * bc));
        if (prime) {
            residual = std::max(residual, common->rank() == n ? 0.0 : 1.0);
            residual = std::max(residual, norm(projector(*common) - projector(nplus)));
        }
        b.record("extension.common_plus_subspace", residual);
        b.note("extension.common_plus_subspace", "rank " + std::to_string(common->rank()));
    });

    guarded(b, "extension.kernel_on_nminus", [&] {
        if (!prime) {
            b.note("extension.kernel_on_nminus", "skipped: not relatively prime");
            return;
        }
        const Eigen::VectorXd sigma =
            singular_values(resolvent_difference_at_i(a1, *a2) * model->nminus.basis());
        const double smallest = sigma(sigma.size() - 1);
        b.record("extension.kernel_on_nminus", smallest > kDefaultCheckTolerance ? 0.0 : 1.0);
        b.note("extension.kernel_on_nminus", "smallest singular value " + std::to_string(smallest));
    });

    std::optional<AngleOperator> alpha;
    std::optional<ComplexMatrix> tan;
    guarded(b, "krein.angle_operator", [&] {
        alpha.emplace(angle_operator(a1, *a2, nplus));
        const ComplexMatrix w = compress(a2->cayley_transform() * a1.cayley_inverse(), nplus);
        const ComplexMatrix rebuilt = -alpha->apply([](Complex x) { return std::exp(-2.0 * kI * x); });
        b.record("krein.angle_operator", norm(rebuilt - w));
        if (prime)
            tan.emplace(tan_alpha(*alpha));
    });

    std::optional<AngleOperator> alpha_common;
    std::optional<ComplexMatrix> tan_common;
    guarded(b, "krein.resolvent_formula", [&] {
        if (!common)
            throw Error(ErrorKind::NumericalFailure, "common deficiency subspace unavailable");
        alpha_common.emplace(angle_operator(a1, *a2, *common));
        tan_common.emplace(tan_alpha(*alpha_common));
    });

    guarded(b, "krein.p_at_i_cayley", [&] {
        const ComplexMatrix via_cayley = p_at_i_via_cayley(a1, *a2, nplus);
        const ComplexMatrix via_resolvent = p_function(a1, *a2, nplus, kI).restricted;
        b.record("krein.p_at_i_cayley", norm(via_cayley - via_resolvent));
    });

    guarded(b, "krein.p_range_rank", [&] {
        if (!prime) {
            b.note("krein.p_range_rank", "skipped: not relatively prime");
            b.note("krein.tan_alpha_inversion", "skipped: not relatively prime");
            return;
        }
        const PSample p_i = p_function(a1, *a2, nplus, kI);
        b.record("krein.p_range_rank", numerical_rank(p_i.full) == n ? 0.0 : 1.0);
        if (tan)
            b.record("krein.tan_alpha_inversion",
                     relative(norm((*tan - kI * id_n) * p_i.restricted - id_n), norm(*tan)));
    });

    guarded(b, "krein.weyl_fixed_point", [&] {
        for (const Extension* ext : extensions) {
            b.record("krein.weyl_fixed_point", norm(weyl_operator(*ext, nplus, kI).m - kI * id_n));
            if (common)
                b.record("krein.weyl_fixed_point",
                         norm(weyl_operator(*ext, *common, kI).m - kI * identity(common->rank())));
        }
    });

    guarded(b, "krein.von_neumann_link", [&] {
        b.record("krein.von_neumann_link", vonneumann_link_check(*model, a1, *a2).residual);
    });

    if (!prime) {
        b.note("krein.p_invertible", "skipped: not relatively prime");
        b.note("krein.p_inverse_weyl", "skipped: not relatively prime");
        b.note("krein.lft_angle_form", "skipped: not relatively prime");
    }

    const std::size_t count = scenario.z_grid.size();
    for (std::size_t k = 0; k < count; ++k) {
        const Complex z = scenario.z_grid[k];
        const Complex z_next = scenario.z_grid[(k + 1) % count];

        std::optional<PSample> pz;
        guarded(b, "krein.p_adjoint_symmetry", [&] {
            pz.emplace(p_function(a1, *a2, nplus, z));
            const PSample pzc = p_function(a1, *a2, nplus, std::conj(z));
            b.record("krein.p_adjoint_symmetry",
                     relative(norm(pzc.full - pz->full.adjoint()), norm(pz->full)));
        });
        guarded(b, "krein.p_support", [&] {
            if (!pz)
                throw Error(ErrorKind::NumericalFailure, "P(z) unavailable");
            const ComplexMatrix q = identity(model->dim) - projector(nplus);
            b.record("krein.p_support", relative(std::max(norm(pz->full * q), norm(q * pz->full)),
                                                 norm(pz->full)));
        });
        guarded(b, "krein.p_translation", [&] {
            const PTranslationReport r = p_translation_check(a1, *a2, nplus, z, z_next);
            b.record("krein.p_translation", relative(r.residual, pz ? norm(pz->full) : 0.0));
            if (!r.ranks_equal())
                b.record("krein.p_translation", 1.0);
        });
        if (prime) {
            guarded(b, "krein.p_invertible", [&] {
                if (!pz)
                    throw Error(ErrorKind::NumericalFailure, "P(z) unavailable");
                const Eigen::VectorXd sigma = singular_values(pz->restricted);
                b.record("krein.p_invertible", sigma(sigma.size() - 1) > tol ? 0.0 : 1.0);
            });
            guarded(b, "krein.p_inverse_weyl", [&] {
                if (!pz || !tan)
                    throw Error(ErrorKind::NumericalFailure, "P(z) or tan(alpha) unavailable");
                const ComplexMatrix inv = p_inverse_via_m(a1, *tan, nplus, z);
                b.record("krein.p_inverse_weyl",
                         relative(norm(inv * pz->restricted - id_n), norm(inv)));
            });
            guarded(b, "krein.lft_angle_form", [&] {
                if (!alpha)
                    throw Error(ErrorKind::NumericalFailure, "angle operator unavailable");
                const WeylSample m1 = weyl_operator(a1, nplus, z);
                const ComplexMatrix angle_form = lft_m1_to_m2_angle(m1, *alpha);
                const ComplexMatrix cayley_form = lft_m1_to_m2(m1, p_at_i_via_cayley(a1, *a2, nplus));
                b.record("krein.lft_angle_form",
                         relative(norm(angle_form - cayley_form), norm(cayley_form)));
            });
        }

        for (const Extension* ext : extensions) {
            guarded(b, "krein.herglotz_bound", [&] {
                const HerglotzReport h = herglotz_check(*ext, nplus, z);
                b.record("krein.herglotz_bound", std::max(0.0, -h.normalized_bound_margin()));
                b.record("krein.herglotz_identity", relative(h.identity_residual, h.identity_scale));
                b.record("krein.weyl_symmetry", h.symmetry_residual);
            });
        }

        guarded(b, "krein.resolvent_formula", [&] {
            if (!common || !tan_common)
                throw Error(ErrorKind::NumericalFailure, "common subspace or its angle unavailable");
            const ComplexMatrix formula = krein_resolvent(a1, *common, *tan_common, z);
            const ComplexMatrix direct = resolvent(*a2, z);
            b.record("krein.resolvent_formula", norm(formula - direct) / norm(direct));
        });

        guarded(b, "krein.lft_direct", [&] {
            const GeneralLftReport r = general_lft_check(*model, a1, *a2, z);
            b.record("krein.lft_direct", r.direct_residual);
            b.record("krein.lft_third_extension", r.third_path_residual);
            b.record("krein.lft_cayley_identities", r.cayley_identity_residual);
        });
    }
    if (norm(p_at_i_via_cayley(a1, *a2, nplus)) <= kDefaultCheckTolerance)
        b.note("krein.lft_direct", "identity transformation");

    report.checks = b.finish();
    return report;
}

// ---------------------------------------------------------------------------
// M-function table

struct MTableRow {
    Complex z;
    ComplexMatrix m;
    double lambda_min_scaled = 0.0;     ///< lambda_min(Im z Im M)
    double lambda_min_normalized = 0.0; ///< lambda_min(Im M / Im z)
    double bound = 0.0;
    std::string error;
};

inline std::vector<MTableRow> tabulate_m(const ScenarioFile& scenario, int which) {
    if (which != 1 && which != 2)
        throw Error(ErrorKind::InvalidInput, "which must be 1 or 2");
    const RestrictionModel model = build_model(resolved_a1(scenario), resolved_nplus(scenario));
    const Extension ext =
        which == 1 ? model.a1 : extension_from_parameter(model, resolved_parameter(scenario));
    std::vector<MTableRow> rows;
    for (Complex z : scenario.z_grid) {
        MTableRow row;
        row.z = z;
        try {
            row.m = weyl_operator(ext, model.nplus, z).m;
            const ComplexMatrix im_m = imag_part(row.m);
            row.lambda_min_scaled = min_eigenvalue(z.imag() * im_m);
            row.lambda_min_normalized = min_eigenvalue(im_m / z.imag());
            row.bound = herglotz_lower_bound(z);
        } catch (const Error& e) {
            row.error = std::string(to_string(e.kind()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// A row passes when it evaluated and meets the lower bound in normalized form.
inline bool row_passes(const MTableRow& row, double tol) {
    return row.error.empty() && row.lambda_min_normalized >= row.bound - tol;
}

inline Json table_to_json(const std::vector<MTableRow>& rows, int which, double tol) {
    Json j;
    j["version"] = kScenarioVersion;
    j["which"] = which;
    Json out = Json::array();
    bool all = true;
    for (const auto& row : rows) {
        Json r;
        r["z"] = complex_to_json(row.z);
        if (row.error.empty()) {
            r["m"] = matrix_to_json(row.m);
            r["lambda_min_im_z_im_m"] = row.lambda_min_scaled;
            r["lambda_min_im_m_over_im_z"] = row.lambda_min_normalized;
            r["herglotz_lower_bound"] = row.bound;
        } else {
            r["error"] = row.error;
        }
        r["pass"] = row_passes(row, tol);
        all = all && row_passes(row, tol);
        out.push_back(std::move(r));
    }
    j["rows"] = std::move(out);
    j["summary"] = all ? "pass" : "fail";
    return j;
}

// ---------------------------------------------------------------------------
// Half-line command and report encoding

inline Report halfline_command(const std::vector<double>& alphas, const std::vector<Complex>& zs,
                               double tol = 1e-10) {
    Report report;
    report.checks = halfline::verify_halfline(zs, alphas, tol);
    Json args;
    args["alpha2"] = alphas;
    Json zj = Json::array();
    for (Complex z : zs)
        zj.push_back(complex_to_json(z));
    args["z"] = std::move(zj);
    args["tolerance"] = tol;
    report.scenario_hash = content_hash(args.dump());
    report.tool_version = kToolVersion;
    return report;
}

inline Json report_to_json(const Report& report) {
    Json j;
    j["version"] = kScenarioVersion;
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json r;
        r["name"] = c.name;
        r["max_residual"] = c.max_residual;
        r["tolerance"] = c.tolerance;
        r["pass"] = c.pass;
        if (!c.error.empty())
            r["error"] = c.error;
        if (!c.detail.empty())
            r["detail"] = c.detail;
        checks.push_back(std::move(r));
    }
    j["checks"] = std::move(checks);
    j["summary"] = report.passed() ? "pass" : "fail";
    j["provenance"] = {{"scenario_hash", report.scenario_hash}, {"tool_version", report.tool_version}};
    return j;
}

} // namespace krein
