#pragma once
#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <higt/core.hpp>

namespace higt {
namespace io {
namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view tok, std::size_t line_no)
{
    tok = trim(tok);
    double v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
    }
    return v;
}

inline long parse_long(std::string_view tok, std::size_t line_no)
{
    tok = trim(tok);
    long v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(tok) + "'");
    }
    return v;
}

template <class F>
inline void split(std::string_view s, char sep, F&& f)
{
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        f(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
}

} // namespace detail

/*
 * Matrix files:
 *
 *   # rows=<r> cols=<c>
 *   v11,v12,...,v1c
 *   ...
 */
inline mat_t parse_matrix(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    long rows = -1, cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() != '#') throw ParseError("matrix file must start with '# rows=<r> cols=<c>'");
        std::istringstream hs{std::string(t.substr(1))};
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("rows=", 0) == 0) rows = detail::parse_long(std::string_view(tok).substr(5), line_no);
            else if (tok.rfind("cols=", 0) == 0) cols = detail::parse_long(std::string_view(tok).substr(5), line_no);
        }
        break;
    }
    if (rows < 0 || cols < 0) throw ParseError("missing or malformed matrix header");

    mat_t M(rows, cols);
    long r = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (r >= rows) throw ParseError("more data rows than header rows=" + std::to_string(rows));
        long c = 0;
        detail::split(t, ',', [&](std::string_view tok) {
            if (c >= cols) {
                throw ParseError("line " + std::to_string(line_no) + ": more than " + std::to_string(cols) + " columns");
            }
            M(r, c++) = detail::parse_double(tok, line_no);
        });
        if (c != cols) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols)
                             + " columns, got " + std::to_string(c));
        }
        ++r;
    }
    if (r != rows) {
        throw ParseError("expected " + std::to_string(rows) + " data rows, got " + std::to_string(r));
    }
    return M;
}

inline mat_t read_matrix(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_matrix(in);
}

inline void format_matrix(std::ostream& out, const mat_t& M)
{
    out << "# rows=" << M.rows() << " cols=" << M.cols() << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (index_t r = 0; r < M.rows(); ++r) {
        for (index_t c = 0; c < M.cols(); ++c) {
            if (c) out << ',';
            out << M(r, c);
        }
        out << '\n';
    }
}

inline void write_matrix(const std::string& path, const mat_t& M)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    format_matrix(out, M);
}

/*
 * Group files: one group per line, 1-based indices.
 *
 *   g <id> : 1,2,3      input group (columns of B)
 *   h <id> : 1,2        output group (rows of B)
 *
 * Blank lines and lines starting with '#' are ignored. Weights default to 1.
 */
inline GroupStructure parse_groups(std::istream& in)
{
    GroupStructure gs;
    std::set<std::string> seen_g, seen_h;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto colon = t.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected '<g|h> <id> : <indices>'");
        }
        std::istringstream head{std::string(t.substr(0, colon))};
        std::string kind, id, extra;
        head >> kind >> id;
        if ((kind != "g" && kind != "h") || id.empty() || (head >> extra)) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed group header");
        }
        IndexGroup group;
        detail::split(t.substr(colon + 1), ',', [&](std::string_view tok) {
            const long v = detail::parse_long(tok, line_no);
            if (v < 1) throw ParseError("line " + std::to_string(line_no) + ": indices are 1-based");
            group.push_back(static_cast<index_t>(v - 1));
        });
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end()), group.end());

        auto& seen = kind == "g" ? seen_g : seen_h;
        if (!seen.insert(id).second) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate " + kind + " id '" + id + "'");
        }
        if (kind == "g") {
            gs.input_groups.push_back(std::move(group));
            gs.input_weights.push_back(1.0);
            gs.input_labels.push_back(id);
        } else {
            gs.output_groups.push_back(std::move(group));
            gs.output_weights.push_back(1.0);
            gs.output_labels.push_back(id);
        }
    }
    return gs;
}

inline GroupStructure read_groups(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_groups(in);
}

inline void format_groups(std::ostream& out, const GroupStructure& gs)
{
    auto emit = [&](char kind, const std::vector<IndexGroup>& groups, const std::vector<std::string>& labels) {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            out << kind << ' ' << (i < labels.size() ? labels[i] : std::to_string(i + 1)) << " : ";
            for (std::size_t p = 0; p < groups[i].size(); ++p) {
                if (p) out << ',';
                out << groups[i][p] + 1;
            }
            out << '\n';
        }
    };
    emit('g', gs.input_groups, gs.input_labels);
    emit('h', gs.output_groups, gs.output_labels);
}

inline void write_groups(const std::string& path, const GroupStructure& gs)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    format_groups(out, gs);
}

} // namespace io
} // namespace higt
