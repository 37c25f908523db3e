#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "afc/errors.hpp"
#include "afc/graph.hpp"
#include "afc/presets.hpp"
#include "afc/sim.hpp"

namespace afc {

// Scenario text format: sections of key = value lines.
//
//   [shape]    preset = paper8        XOR  dim = m plus point = x y [z] rows
//   [graph]    edges = 1-2, 1-3, ...  (appendable; defaults to the preset
//              framework when the shape is a preset)
//   [weights]  w = i j value rows, or file = path (CSV rows i,j,w);
//              optional, validated instead of computed
//   [motion]   kappa_t1/t2/r/s/s1/s2 = value (2D shapes only) and/or
//              G = row-major entries, v = entries
//   [motion@T] same keys, active from time T (schedule span)
//   [gains]    h = auto | value (default auto), kappa = value (default 1)
//   [sim]      dt (default 0.001), t_end (required), integrator = rk4|euler,
//              engine = centralized|distributed, perturb_seed (default 1),
//              perturb_scale (default 0.2)
//   [output]   decimate = N (default 100)
//
// Lines starting with # or ; are comments. Scalar keys take the last value
// given; point, edges, and w rows accumulate.

struct MotionSpec {
    std::map<std::string, double> kappas;  // keys t1, t2, r, s, s1, s2
    std::vector<double> G_raw;             // row-major, length dim*dim
    std::vector<double> v_raw;             // length dim
    bool has_G = false;
    bool has_v = false;
};

struct Scenario {
    std::string name;
    std::string base_dir;

    std::string shape_preset;
    int dim = 0;
    std::vector<std::vector<double>> points;

    std::vector<std::pair<int, int>> edges;

    std::vector<std::tuple<int, int, double>> user_weights;
    std::string weights_file;

    std::vector<std::pair<double, MotionSpec>> schedule;

    bool h_auto = true;
    double h = 0.0;
    double kappa = 1.0;

    double dt = 1e-3;
    double t_end = 0.0;
    Integrator integrator = Integrator::Rk4;
    bool distributed = false;
    unsigned long long perturb_seed = 1;
    double perturb_scale = 0.2;

    int decimate = 100;

    bool has_user_weights() const {
        return !user_weights.empty() || !weights_file.empty();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline double to_double(const std::string& tok, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    bool ok = true;
    try {
        v = std::stod(tok, &pos);
    } catch (...) {
        ok = false;
    }
    if (!ok || pos != tok.size()) {
        throw ParseError(line, "scenario: line " + std::to_string(line) +
                                   ": expected a number, got '" + tok + "'");
    }
    return v;
}

inline long long to_int(const std::string& tok, int line) {
    std::size_t pos = 0;
    long long v = 0;
    bool ok = true;
    try {
        v = std::stoll(tok, &pos);
    } catch (...) {
        ok = false;
    }
    if (!ok || pos != tok.size()) {
        throw ParseError(line, "scenario: line " + std::to_string(line) +
                                   ": expected an integer, got '" + tok + "'");
    }
    return v;
}

inline unsigned long long to_uint(const std::string& tok, int line) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    bool ok = true;
    try {
        v = std::stoull(tok, &pos);
    } catch (...) {
        ok = false;
    }
    if (!ok || pos != tok.size()) {
        throw ParseError(line,
                         "scenario: line " + std::to_string(line) +
                             ": expected a nonnegative integer, got '" + tok + "'");
    }
    return v;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text,
                                    const std::string& name = "",
                                    const std::string& base_dir = ".") {
    Scenario s;
    s.name = name;
    s.base_dir = base_dir;

    std::map<double, MotionSpec> motion_spans;
    bool t_end_given = false;
    bool dim_given = false;

    std::string section;
    double section_time = 0.0;  // for motion spans

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string ln = detail::trim(raw);
        if (ln.empty() || ln[0] == '#' || ln[0] == ';') continue;

        if (ln[0] == '[') {
            if (ln.back() != ']') {
                throw ParseError(line, "scenario: line " + std::to_string(line) +
                                           ": unterminated section header");
            }
            const std::string inner = detail::trim(ln.substr(1, ln.size() - 2));
            if (inner == "shape" || inner == "graph" || inner == "weights" ||
                inner == "motion" || inner == "gains" || inner == "sim" ||
                inner == "output") {
                section = inner;
                section_time = 0.0;
            } else if (inner.rfind("motion@", 0) == 0) {
                section = "motion";
                section_time = detail::to_double(inner.substr(7), line);
                if (section_time < 0.0) {
                    throw ParseError(line,
                                     "scenario: line " + std::to_string(line) +
                                         ": motion span time must be nonnegative");
                }
            } else {
                throw ParseError(line, "scenario: line " + std::to_string(line) +
                                           ": unknown section [" + inner + "]");
            }
            continue;
        }

        const std::size_t eq = ln.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line, "scenario: line " + std::to_string(line) +
                                       ": expected key = value");
        }
        if (section.empty()) {
            throw ParseError(line, "scenario: line " + std::to_string(line) +
                                       ": key before any section header");
        }
        const std::string key = detail::trim(ln.substr(0, eq));
        const std::string value = detail::trim(ln.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(line, "scenario: line " + std::to_string(line) +
                                       ": empty key");
        }

        auto unknown_key = [&]() -> ParseError {
            return ParseError(line, "scenario: line " + std::to_string(line) +
                                        ": unknown key '" + key +
                                        "' in section [" + section + "]");
        };

        if (section == "shape") {
            if (key == "preset") {
                s.shape_preset = value;
            } else if (key == "dim") {
                s.dim = static_cast<int>(detail::to_int(value, line));
                dim_given = true;
            } else if (key == "point") {
                std::vector<double> row;
                for (const auto& tok : detail::split_ws(value)) {
                    row.push_back(detail::to_double(tok, line));
                }
                if (row.empty()) {
                    throw ParseError(line,
                                     "scenario: line " + std::to_string(line) +
                                         ": point row needs coordinates");
                }
                s.points.push_back(std::move(row));
            } else {
                throw unknown_key();
            }
        } else if (section == "graph") {
            if (key == "edges") {
                for (const auto& part : detail::split_on(value, ',')) {
                    const std::string tok = detail::trim(part);
                    if (tok.empty()) {
                        throw ParseError(line,
                                         "scenario: line " + std::to_string(line) +
                                             ": empty edge token");
                    }
                    const auto halves = detail::split_on(tok, '-');
                    if (halves.size() != 2) {
                        throw ParseError(line,
                                         "scenario: line " + std::to_string(line) +
                                             ": edge token '" + tok +
                                             "' is not of the form a-b");
                    }
                    const int a = static_cast<int>(
                        detail::to_int(detail::trim(halves[0]), line));
                    const int b = static_cast<int>(
                        detail::to_int(detail::trim(halves[1]), line));
                    s.edges.emplace_back(a, b);
                }
            } else {
                throw unknown_key();
            }
        } else if (section == "weights") {
            if (key == "w") {
                const auto toks = detail::split_ws(value);
                if (toks.size() != 3) {
                    throw ParseError(line,
                                     "scenario: line " + std::to_string(line) +
                                         ": weight row must be: w = i j value");
                }
                s.user_weights.emplace_back(
                    static_cast<int>(detail::to_int(toks[0], line)),
                    static_cast<int>(detail::to_int(toks[1], line)),
                    detail::to_double(toks[2], line));
            } else if (key == "file") {
                s.weights_file = value;
            } else {
                throw unknown_key();
            }
        } else if (section == "motion") {
            MotionSpec& spec = motion_spans[section_time];
            if (key.rfind("kappa_", 0) == 0) {
                const std::string coord = key.substr(6);
                if (coord != "t1" && coord != "t2" && coord != "r" &&
                    coord != "s" && coord != "s1" && coord != "s2") {
                    throw unknown_key();
                }
                spec.kappas[coord] = detail::to_double(value, line);
            } else if (key == "G") {
                spec.G_raw.clear();
                for (const auto& tok : detail::split_ws(value)) {
                    spec.G_raw.push_back(detail::to_double(tok, line));
                }
                spec.has_G = true;
            } else if (key == "v") {
                spec.v_raw.clear();
                for (const auto& tok : detail::split_ws(value)) {
                    spec.v_raw.push_back(detail::to_double(tok, line));
                }
                spec.has_v = true;
            } else {
                throw unknown_key();
            }
        } else if (section == "gains") {
            if (key == "h") {
                if (value == "auto") {
                    s.h_auto = true;
                    s.h = 0.0;
                } else {
                    s.h_auto = false;
                    s.h = detail::to_double(value, line);
                }
            } else if (key == "kappa") {
                s.kappa = detail::to_double(value, line);
            } else {
                throw unknown_key();
            }
        } else if (section == "sim") {
            if (key == "dt") {
                s.dt = detail::to_double(value, line);
            } else if (key == "t_end") {
                s.t_end = detail::to_double(value, line);
                t_end_given = true;
            } else if (key == "integrator") {
                if (value == "rk4") {
                    s.integrator = Integrator::Rk4;
                } else if (value == "euler") {
                    s.integrator = Integrator::Euler;
                } else {
                    throw ParseError(line,
                                     "scenario: line " + std::to_string(line) +
                                         ": integrator must be rk4 or euler");
                }
            } else if (key == "engine") {
                if (value == "centralized") {
                    s.distributed = false;
                } else if (value == "distributed") {
                    s.distributed = true;
                } else {
                    throw ParseError(
                        line, "scenario: line " + std::to_string(line) +
                                  ": engine must be centralized or distributed");
                }
            } else if (key == "perturb_seed") {
                s.perturb_seed = detail::to_uint(value, line);
            } else if (key == "perturb_scale") {
                s.perturb_scale = detail::to_double(value, line);
            } else {
                throw unknown_key();
            }
        } else if (section == "output") {
            if (key == "decimate") {
                s.decimate = static_cast<int>(detail::to_int(value, line));
            } else {
                throw unknown_key();
            }
        }
    }

    // Semantic validation, independent of line numbers from here on.
    const bool has_inline = dim_given || !s.points.empty();
    if (!s.shape_preset.empty() && has_inline) {
        throw ValidationError("shape",
                              "scenario: give either a shape preset or inline "
                              "coordinates, not both");
    }
    if (s.shape_preset.empty() && !has_inline) {
        throw ValidationError("shape",
                              "scenario: a shape preset or inline coordinates "
                              "are required");
    }
    if (!s.shape_preset.empty()) {
        if (!presets::shape_preset_exists(s.shape_preset)) {
            throw ValidationError("shape", "scenario: unknown shape preset '" +
                                               s.shape_preset + "'");
        }
        s.dim = 2;
        if (s.edges.empty()) s.edges = presets::paper8_edges();
    } else {
        if (!dim_given || s.dim < 1) {
            throw ValidationError("dim",
                                  "scenario: inline shapes need dim = 1, 2, ...");
        }
        if (s.points.empty()) {
            throw ValidationError("point", "scenario: inline shapes need point rows");
        }
        for (const auto& row : s.points) {
            if (static_cast<int>(row.size()) != s.dim) {
                throw ValidationError(
                    "point", "scenario: every point row needs exactly " +
                                 std::to_string(s.dim) + " coordinates");
            }
        }
        if (s.edges.empty()) {
            throw ValidationError("edges",
                                  "scenario: an edge list is required with an "
                                  "inline shape");
        }
    }

    if (!s.user_weights.empty() && !s.weights_file.empty()) {
        throw ValidationError("weights",
                              "scenario: give weight rows or a weights file, "
                              "not both");
    }

    if (motion_spans.empty()) motion_spans[0.0] = MotionSpec{};
    if (motion_spans.begin()->first != 0.0) {
        throw ValidationError("motion",
                              "scenario: the first motion span must start at t = 0");
    }
    for (auto& [t_from, spec] : motion_spans) {
        if (!spec.kappas.empty() && s.dim != 2) {
            throw ValidationError("motion",
                                  "scenario: named kappa coordinates are "
                                  "2-dimensional; use G and v instead");
        }
        if (spec.has_G &&
            static_cast<int>(spec.G_raw.size()) != s.dim * s.dim) {
            throw ValidationError(
                "G", "scenario: G needs " + std::to_string(s.dim * s.dim) +
                         " row-major entries");
        }
        if (spec.has_v && static_cast<int>(spec.v_raw.size()) != s.dim) {
            throw ValidationError(
                "v", "scenario: v needs " + std::to_string(s.dim) + " entries");
        }
        s.schedule.emplace_back(t_from, std::move(spec));
    }

    if (!s.h_auto && !(s.h > 0.0)) {
        throw ValidationError("h", "scenario: h must be positive or auto");
    }
    if (!(s.dt > 0.0)) {
        throw ValidationError("dt", "scenario: dt must be positive");
    }
    if (!t_end_given) {
        throw ValidationError("t_end", "scenario: t_end is required");
    }
    if (s.t_end < 0.0) {
        throw ValidationError("t_end", "scenario: t_end must be nonnegative");
    }
    if (s.perturb_scale < 0.0) {
        throw ValidationError("perturb_scale",
                              "scenario: perturb_scale must be nonnegative");
    }
    if (s.decimate < 1) {
        throw ValidationError("decimate", "scenario: decimate must be at least 1");
    }
    return s;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("scenario: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    std::string dir = ".";
    std::string stem = path;
    const std::size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) {
        dir = path.substr(0, slash);
        stem = path.substr(slash + 1);
    }
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_scenario_text(buf.str(), stem, dir);
}

}  // namespace afc
