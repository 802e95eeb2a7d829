#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "critspectra/correlation.hpp"
#include "critspectra/errors.hpp"
#include "critspectra/ising.hpp"

namespace critspectra::io {

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xff));
}

template <typename T>
T get_le(std::istream& in) {
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        const int c = in.get();
        if (c == EOF) throw config_error("binary read: unexpected end of file");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
    }
    return static_cast<T>(v);
}

}

/// Writes a file atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot open for writing: " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw config_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// key=value sidecar carrying the generating seed and config digest.
inline void write_metadata_sidecar(const std::filesystem::path& artifact,
                                   const std::map<std::string, std::string>& fields) {
    std::string body;
    for (const auto& [k, v] : fields) body += k + "=" + v + "\n";
    atomic_write(artifact.string() + ".meta", body);
}

// ---------------------------------------------------------------------------
// Time-series dump: magic "CSTS", version u32, L u32, N u32, tau u64,
// seed u64, then row-major i8 spin data. Little-endian throughout.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t csts_version = 1;

inline void write_timeseries(const std::filesystem::path& path, const TimeSeriesMatrix& ts) {
    std::string out;
    out.reserve(24 + ts.data.size());
    out += "CSTS";
    detail::put_le<std::uint32_t>(out, csts_version);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ts.lattice_side));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ts.n_series));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ts.tau));
    detail::put_le<std::uint64_t>(out, ts.seed);
    out.append(reinterpret_cast<const char*>(ts.data.data()), ts.data.size());
    atomic_write(path, out);
}

inline TimeSeriesMatrix read_timeseries(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open time-series dump: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "CSTS")
        throw config_error("not a CSTS time-series dump: " + path.string());
    const auto version = detail::get_le<std::uint32_t>(in);
    if (version != csts_version)
        throw config_error("unsupported CSTS version " + std::to_string(version));
    TimeSeriesMatrix ts;
    ts.lattice_side = static_cast<int>(detail::get_le<std::uint32_t>(in));
    ts.n_series = static_cast<int>(detail::get_le<std::uint32_t>(in));
    ts.tau = static_cast<long>(detail::get_le<std::uint64_t>(in));
    ts.seed = detail::get_le<std::uint64_t>(in);
    if (ts.n_series < 1 || ts.tau < 1)
        throw config_error("CSTS header with empty dimensions");
    ts.data.resize(static_cast<std::size_t>(ts.n_series) * static_cast<std::size_t>(ts.tau));
    in.read(reinterpret_cast<char*>(ts.data.data()),
            static_cast<std::streamsize>(ts.data.size()));
    if (!in) throw config_error("CSTS dump truncated: " + path.string());
    for (auto v : ts.data)
        if (v != 1 && v != -1)
            throw config_error("CSTS dump contains non-spin value");
    ts.site_indices.resize(ts.n_series);
    for (int i = 0; i < ts.n_series; ++i)
        ts.site_indices[i] = static_cast<std::uint32_t>(i);
    return ts;
}

/// CSV export of a recording, one row per site.
inline void write_timeseries_csv(const std::filesystem::path& path,
                                 const TimeSeriesMatrix& ts,
                                 const std::string& header_comment = {}) {
    std::string out;
    if (!header_comment.empty()) out += "# " + header_comment + "\n";
    out += "site";
    for (long t = 0; t < ts.tau; ++t) out += ",t" + std::to_string(t);
    out += "\n";
    for (int m = 0; m < ts.n_series; ++m) {
        out += std::to_string(ts.site_indices[m]);
        for (long t = 0; t < ts.tau; ++t)
            out += ts.at(m, t) > 0 ? ",1" : ",-1";
        out += "\n";
    }
    atomic_write(path, out);
}

// ---------------------------------------------------------------------------
// Correlation-matrix dump: magic "CSCM", D u32, tau u64, then the upper
// triangle row-major as f64.
// ---------------------------------------------------------------------------

inline void write_correlation(const std::filesystem::path& path, const CorrelationMatrix& c) {
    std::string out;
    out += "CSCM";
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.dim()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(c.tau()));
    for (int i = 0; i < c.dim(); ++i) {
        for (int j = i; j < c.dim(); ++j) {
            const double v = c(i, j);
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(v));
            std::memcpy(&bits, &v, sizeof(bits));
            detail::put_le<std::uint64_t>(out, bits);
        }
    }
    atomic_write(path, out);
}

inline CorrelationMatrix read_correlation(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open correlation dump: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "CSCM")
        throw config_error("not a CSCM correlation dump: " + path.string());
    const int dim = static_cast<int>(detail::get_le<std::uint32_t>(in));
    const long tau = static_cast<long>(detail::get_le<std::uint64_t>(in));
    if (dim < 1) throw config_error("CSCM header with empty dimension");
    CorrelationMatrix c(dim, tau);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const std::uint64_t bits = detail::get_le<std::uint64_t>(in);
            double v;
            std::memcpy(&v, &bits, sizeof(v));
            c.lower(j, i) = v;
        }
    }
    return c;
}

/// CSV matrix export (square, no compression); for interoperability only.
inline void write_correlation_csv(const std::filesystem::path& path,
                                  const CorrelationMatrix& c,
                                  const std::string& header_comment = {}) {
    std::ostringstream out;
    out.precision(17);
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    for (int i = 0; i < c.dim(); ++i) {
        for (int j = 0; j < c.dim(); ++j) {
            if (j) out << ',';
            out << c(i, j);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

// ---------------------------------------------------------------------------
// Tabular CSV with provenance comments.
// ---------------------------------------------------------------------------

/// Writes rows of doubles under fixed column names, preceded by comment
/// lines ("# key=value") carrying the run provenance.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows,
                      const std::map<std::string, std::string>& comments = {}) {
    std::ostringstream out;
    out.precision(17);
    for (const auto& [k, v] : comments) out << "# " << k << "=" << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out << ',';
        out << columns[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << row[c];
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

}
