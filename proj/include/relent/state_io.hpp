#pragma once

// On-disk state format: {"dims":[dA,dB],"matrix":[[[re,im],...],...]},
// row-major, decimals with 17 significant digits so the round trip is exact.
// Spectra export as CSV, one eigenvalue per line, ascending.

#include "relent/states.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace relent {

struct ParseError : Error {
    using Error::Error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace detail

inline std::string state_to_json(const DensityMatrix& s) {
    const int n = s.dims.total();
    std::string out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 48 + 64);
    out += "{\"dims\":[";
    out += std::to_string(s.dims.dim_a);
    out += ",";
    out += std::to_string(s.dims.dim_b);
    out += "],\"matrix\":[";
    for (int i = 0; i < n; ++i) {
        out += i == 0 ? "[" : ",[";
        for (int j = 0; j < n; ++j) {
            const Complex& z = s.matrix(i, j);
            out += j == 0 ? "[" : ",[";
            out += detail::format_double(z.real());
            out += ",";
            out += detail::format_double(z.imag());
            out += "]";
        }
        out += "]";
    }
    out += "]}\n";
    return out;
}

inline DensityMatrix state_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state file: ") + e.what());
    }
    try {
        const auto& dims_j = j.at("dims");
        if (!dims_j.is_array() || dims_j.size() != 2) {
            throw ParseError("state file: dims must be [dA, dB]");
        }
        BipartiteDims dims{dims_j[0].get<int>(), dims_j[1].get<int>()};
        require_valid(dims);
        const int n = dims.total();
        const auto& rows = j.at("matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw ParseError("state file: matrix must have dA*dB rows");
        }
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != n) {
                throw ParseError("state file: ragged matrix row");
            }
            for (int jj = 0; jj < n; ++jj) {
                const auto& cell = row[static_cast<std::size_t>(jj)];
                if (!cell.is_array() || cell.size() != 2) {
                    throw ParseError("state file: entries must be [re, im]");
                }
                m(i, jj) = Complex(cell[0].get<double>(), cell[1].get<double>());
            }
        }
        return validate_density(m, dims);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("state file: ") + e.what());
    }
}

inline DensityMatrix read_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("state file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return state_from_json(buf.str());
}

inline void write_state_file(const std::string& path, const DensityMatrix& s) {
    std::ofstream out(path);
    if (!out) throw Error("state file: cannot write " + path);
    out << state_to_json(s);
}

inline std::string spectrum_csv(const DensityMatrix& s) {
    const EigenDecomposition ed = eig_hermitian(s.matrix);
    std::string out;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
        out += detail::format_double(ed.eigenvalues[i]);
        out += "\n";
    }
    return out;
}

inline void write_spectrum_csv(const std::string& path, const DensityMatrix& s) {
    std::ofstream out(path);
    if (!out) throw Error("spectrum file: cannot write " + path);
    out << spectrum_csv(s);
}

}  // namespace relent
