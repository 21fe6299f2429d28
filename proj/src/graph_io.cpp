// Text format:
//   erg v1 n=<n> directed=<0|1>
//   i j          one edge per line, 0-indexed; undirected requires i < j
//   # comment    anywhere; blank lines ignored
// Binary format: "ERG1", u32 n (little endian), u8 directed, then the bits
// (upper triangle row-major for undirected, full n*n for directed), LSB first.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "rer/error.hpp"
#include "rer/graph.hpp"

namespace rer {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'R', 'G', '1'};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view s) {
    const auto h = s.find('#');
    return h == std::string_view::npos ? s : s.substr(0, h);
}

bool parse_u64(std::string_view tok, std::uint64_t& out) {
    if (tok.empty()) return false;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

struct Header {
    std::size_t n;
    bool directed;
};

Header parse_header(std::string_view line, std::size_t lineno) {
    const auto toks = split_ws(line);
    if (toks.size() != 4 || toks[0] != "erg" || toks[1] != "v1")
        throw ParseError(lineno, "expected header 'erg v1 n=<n> directed=<0|1>'");
    if (toks[2].substr(0, 2) != "n=") throw ParseError(lineno, "header is missing n=");
    std::uint64_t n = 0;
    if (!parse_u64(toks[2].substr(2), n) || n < 1 || n > 0xffffffffULL)
        throw ParseError(lineno, "invalid node count '" + std::string(toks[2].substr(2)) + "'");
    if (toks[3] != "directed=0" && toks[3] != "directed=1")
        throw ParseError(lineno, "directed flag must be directed=0 or directed=1");
    return {static_cast<std::size_t>(n), toks[3] == "directed=1"};
}

void put_bit(std::vector<unsigned char>& buf, std::size_t k, bool v) {
    if (v) buf[k >> 3] |= static_cast<unsigned char>(1u << (k & 7));
}
bool get_bit(const std::vector<unsigned char>& buf, std::size_t k) { return (buf[k >> 3] >> (k & 7)) & 1u; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

AnyGraph parse_binary(const std::string& bytes) {
    if (bytes.size() < 9) throw ParseError(0, "binary graph file truncated");
    std::uint32_t n = 0;
    for (int b = 0; b < 4; ++b) n |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + b])) << (8 * b);
    const auto flag = static_cast<unsigned char>(bytes[8]);
    if (n < 1) throw ParseError(0, "binary graph has n=0");
    if (flag > 1) throw ParseError(0, "binary directed flag must be 0 or 1");
    const std::size_t nbits = flag ? std::size_t{n} * n : std::size_t{n} * (n - 1) / 2;
    if (bytes.size() != 9 + (nbits + 7) / 8) throw ParseError(0, "binary graph payload has wrong length");
    std::vector<unsigned char> buf(bytes.begin() + 9, bytes.end());
    std::size_t k = 0;
    if (flag) {
        DirectedAdjacencyMatrix g(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j, ++k)
                if (get_bit(buf, k)) {
                    if (i == j) throw ParseError(0, "self-loop on node " + std::to_string(i));
                    g.set_edge(i, j, true);
                }
        return g;
    }
    AdjacencyMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++k)
            if (get_bit(buf, k)) a.set_edge(i, j, true);
    return a;
}

std::string binary_header(std::size_t n, bool directed) {
    if (n > 0xffffffffULL) throw ParameterError("graph too large for the binary format");
    std::string out(kMagic.begin(), kMagic.end());
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((n >> (8 * b)) & 0xff));
    out.push_back(directed ? 1 : 0);
    return out;
}

}  // namespace

AnyGraph parse_graph_text(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    bool have_header = false;
    Header h{};
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (!have_header) {
            h = parse_header(line, lineno);
            have_header = true;
            continue;
        }
        // Accept "i j", and tolerate "(i,j)".
        std::string norm(line);
        for (char& c : norm)
            if (c == '(' || c == ')' || c == ',') c = ' ';
        const auto toks = split_ws(norm);
        std::uint64_t i = 0, j = 0;
        if (toks.size() != 2 || !parse_u64(toks[0], i) || !parse_u64(toks[1], j))
            throw ParseError(lineno, "expected an edge 'i j', got '" + std::string(line) + "'");
        if (i >= h.n || j >= h.n)
            throw ParseError(lineno, "node id out of range [0," + std::to_string(h.n) + "): '" + std::string(line) + "'");
        if (i == j) throw ParseError(lineno, "self-loop on node " + std::to_string(i) + " is not allowed");
        if (!h.directed && i > j) throw ParseError(lineno, "undirected edges must be written with i < j");
        if (!seen.emplace(i, j).second) throw ParseError(lineno, "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    if (!have_header) throw ParseError(lineno, "missing header line");

    if (h.directed) {
        DirectedAdjacencyMatrix g(h.n);
        for (auto [i, j] : edges) g.set_edge(i, j, true);
        return g;
    }
    AdjacencyMatrix a(h.n);
    for (auto [i, j] : edges) a.set_edge(i, j, true);
    return a;
}

AnyGraph read_any_graph(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) return parse_binary(bytes);
    return parse_graph_text(bytes);
}

AdjacencyMatrix read_graph(const std::filesystem::path& path) {
    auto g = read_any_graph(path);
    if (auto* a = std::get_if<AdjacencyMatrix>(&g)) return std::move(*a);
    throw ParseError(1, "'" + path.string() + "' holds a directed graph; an undirected one was expected");
}

DirectedAdjacencyMatrix read_directed_graph(const std::filesystem::path& path) {
    auto g = read_any_graph(path);
    if (auto* d = std::get_if<DirectedAdjacencyMatrix>(&g)) return std::move(*d);
    throw ParseError(1, "'" + path.string() + "' holds an undirected graph; a directed one was expected");
}

std::string format_graph_text(const AdjacencyMatrix& a) {
    std::string out = "erg v1 n=" + std::to_string(a.n()) + " directed=0\n";
    for (std::size_t i = 0; i < a.n(); ++i)
        for (std::size_t j = i + 1; j < a.n(); ++j)
            if (a.has_edge(i, j)) out += std::to_string(i) + ' ' + std::to_string(j) + '\n';
    return out;
}

std::string format_graph_text(const DirectedAdjacencyMatrix& g) {
    std::string out = "erg v1 n=" + std::to_string(g.n()) + " directed=1\n";
    for (std::size_t i = 0; i < g.n(); ++i)
        for (std::size_t j = 0; j < g.n(); ++j)
            if (g.has_edge(i, j)) out += std::to_string(i) + ' ' + std::to_string(j) + '\n';
    return out;
}

void write_graph(const AdjacencyMatrix& a, const std::filesystem::path& path, GraphFormat fmt) {
    if (fmt == GraphFormat::text) return write_file(path, format_graph_text(a));
    const std::size_t n = a.n();
    std::vector<unsigned char> buf((n * (n - 1) / 2 + 7) / 8, 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++k) put_bit(buf, k, a.has_edge(i, j));
    write_file(path, binary_header(n, false) + std::string(buf.begin(), buf.end()));
}

void write_graph(const DirectedAdjacencyMatrix& g, const std::filesystem::path& path, GraphFormat fmt) {
    if (fmt == GraphFormat::text) return write_file(path, format_graph_text(g));
    const std::size_t n = g.n();
    std::vector<unsigned char> buf((n * n + 7) / 8, 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j, ++k) put_bit(buf, k, g.has_edge(i, j));
    write_file(path, binary_header(n, true) + std::string(buf.begin(), buf.end()));
}

}  // namespace rer
