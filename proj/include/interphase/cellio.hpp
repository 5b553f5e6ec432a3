#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "interphase/solver.hpp"

namespace interphase {

// File format (shared by cells and solutions): a single line of JSON followed
// by '\n', then the payload as flat row-major little-endian 64-bit floats.
//   cell:     header {kind, dim, shape, lengths, phase_table}; payload is the
//             phase map (one float per voxel holding the table index).
//   solution: header {kind, dim, shape, lengths, applied_field, mean_current,
//             residual}; payload is potential (n values), then E and J
//             (n*dim values each, components interleaved per voxel).

namespace detail {

inline void swap_if_big_endian(std::vector<double>& xs) {
    if constexpr (std::endian::native == std::endian::big) {
        for (double& x : xs) {
            std::uint64_t u;
            std::memcpy(&u, &x, 8);
            u = __builtin_bswap64(u);
            std::memcpy(&x, &u, 8);
        }
    }
}

inline void write_doubles(std::ostream& os, const std::vector<double>& xs) {
    std::vector<double> buf = xs;
    swap_if_big_endian(buf);
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

inline std::vector<double> read_doubles(std::istream& is, std::size_t count,
                                        const std::string& what) {
    std::vector<double> xs(count);
    is.read(reinterpret_cast<char*>(xs.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != count * sizeof(double))
        throw std::runtime_error("truncated payload while reading " + what);
    swap_if_big_endian(xs);
    return xs;
}

inline nlohmann::json read_header(std::istream& is, const std::string& path,
                                  const std::string& expected_kind) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("missing header line in " + path);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("bad JSON header in " + path + ": " + e.what());
    }
    if (h.value("kind", "") != expected_kind)
        throw std::runtime_error(path + " is not a " + expected_kind + " file");
    return h;
}

}  // namespace detail

inline void save_cell(const PeriodicCell& cell, const std::string& path) {
    nlohmann::json h;
    h["kind"] = "cell";
    h["dim"] = cell.dim();
    h["shape"] = std::vector<int>(cell.shape().begin(), cell.shape().begin() + cell.dim());
    h["lengths"] =
        std::vector<double>(cell.lengths().begin(), cell.lengths().begin() + cell.dim());
    auto& table = h["phase_table"] = nlohmann::json::array();
    for (const auto& t : cell.phase_table()) {
        std::vector<double> entries;
        for (int i = 0; i < t.dim(); ++i)
            for (int j = 0; j < t.dim(); ++j) entries.push_back(t(i, j));
        table.push_back(entries);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << h.dump() << '\n';
    std::vector<double> map(cell.phase_map().begin(), cell.phase_map().end());
    detail::write_doubles(os, map);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline PeriodicCell load_cell(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json h = detail::read_header(is, path, "cell");
    const int dim = h.at("dim").get<int>();
    if (dim < 2 || dim > 3) throw std::runtime_error("bad dimension in " + path);
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> lengths{1, 1, 1};
    auto shp = h.at("shape").get<std::vector<int>>();
    auto len = h.at("lengths").get<std::vector<double>>();
    if (static_cast<int>(shp.size()) != dim || static_cast<int>(len.size()) != dim)
        throw std::runtime_error("shape/lengths do not match dimension in " + path);
    std::size_t nvox = 1;
    for (int a = 0; a < dim; ++a) {
        shape[a] = shp[a];
        lengths[a] = len[a];
        nvox *= static_cast<std::size_t>(std::max(shp[a], 0));
    }
    std::vector<ConductivityTensor> table;
    for (const auto& entry : h.at("phase_table")) {
        auto vals = entry.get<std::vector<double>>();
        if (static_cast<int>(vals.size()) != dim * dim)
            throw std::runtime_error("bad phase table entry in " + path);
        table.emplace_back(dim, std::span<const double>(vals));
    }
    std::vector<double> raw = detail::read_doubles(is, nvox, "phase map of " + path);
    std::vector<std::uint32_t> map(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = raw[i];
        if (!(v >= 0) || v != std::floor(v) || v >= static_cast<double>(table.size()))
            throw std::runtime_error("bad phase index in " + path);
        map[i] = static_cast<std::uint32_t>(v);
    }
    return PeriodicCell(dim, shape, lengths, std::move(map), std::move(table));
}

inline void save_solution(const PeriodicCellSolution& sol, const std::string& path) {
    nlohmann::json h;
    h["kind"] = "solution";
    h["dim"] = sol.dim;
    h["shape"] = std::vector<int>(sol.shape.begin(), sol.shape.begin() + sol.dim);
    h["lengths"] = std::vector<double>(sol.lengths.begin(), sol.lengths.begin() + sol.dim);
    std::vector<double> e0(sol.dim), mj(sol.dim);
    for (int c = 0; c < sol.dim; ++c) {
        e0[c] = sol.applied_field[c];
        mj[c] = sol.mean_current[c];
    }
    h["applied_field"] = e0;
    h["mean_current"] = mj;
    h["residual"] = sol.residual;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << h.dump() << '\n';
    detail::write_doubles(os, sol.potential);
    detail::write_doubles(os, sol.E);
    detail::write_doubles(os, sol.J);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline PeriodicCellSolution load_solution(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    nlohmann::json h = detail::read_header(is, path, "solution");
    PeriodicCellSolution sol;
    sol.dim = h.at("dim").get<int>();
    if (sol.dim < 2 || sol.dim > 3) throw std::runtime_error("bad dimension in " + path);
    auto shp = h.at("shape").get<std::vector<int>>();
    auto len = h.at("lengths").get<std::vector<double>>();
    if (static_cast<int>(shp.size()) != sol.dim || static_cast<int>(len.size()) != sol.dim)
        throw std::runtime_error("shape/lengths do not match dimension in " + path);
    std::size_t nvox = 1;
    for (int a = 0; a < sol.dim; ++a) {
        sol.shape[a] = shp[a];
        sol.lengths[a] = len[a];
        if (shp[a] < 1) throw std::runtime_error("bad shape in " + path);
        nvox *= static_cast<std::size_t>(shp[a]);
    }
    auto e0 = h.at("applied_field").get<std::vector<double>>();
    auto mj = h.at("mean_current").get<std::vector<double>>();
    if (static_cast<int>(e0.size()) != sol.dim || static_cast<int>(mj.size()) != sol.dim)
        throw std::runtime_error("bad field vectors in " + path);
    sol.applied_field = Vec(sol.dim, std::span<const double>(e0));
    sol.mean_current = Vec(sol.dim, std::span<const double>(mj));
    sol.residual = h.at("residual").get<double>();
    sol.potential = detail::read_doubles(is, nvox, "potential of " + path);
    sol.E = detail::read_doubles(is, nvox * sol.dim, "E grid of " + path);
    sol.J = detail::read_doubles(is, nvox * sol.dim, "J grid of " + path);
    return sol;
}

}  // namespace interphase
