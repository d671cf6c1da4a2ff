#include "lsrank/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace lsrank {

namespace fs = std::filesystem;
using json = nlohmann::json;

ParseError::ParseError(const std::string& what, int line)
    : ValidationError(what + " at line " + std::to_string(line)), line_(line) {}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<int> parse_ints(const std::string& line, int lineno, char sep = 0) {
    std::string text = line;
    if (sep) std::replace(text.begin(), text.end(), sep, ' ');
    std::istringstream ls(text);
    std::vector<int> out;
    std::string tok;
    while (ls >> tok) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("expected an integer, got '" + tok + "'", lineno);
        }
        if (used != tok.size()) throw ParseError("expected an integer, got '" + tok + "'", lineno);
        out.push_back(v);
    }
    return out;
}

}  // namespace

RankPanel parse_panel_block(std::istream& is) {
    std::vector<std::vector<std::vector<int>>> blocks;
    std::vector<std::vector<int>> current;
    std::vector<int> first_line;
    std::string line;
    int lineno = 0;
    auto flush = [&]() {
        if (!current.empty()) blocks.push_back(std::move(current));
        current.clear();
    };
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (!s.empty() && s[0] == '#') continue;
        if (s.empty()) {
            flush();
            continue;
        }
        auto row = parse_ints(s, lineno);
        if (current.empty()) first_line.push_back(lineno);
        const std::size_t n = blocks.empty() ? (current.empty() ? row.size() : current.front().size())
                                             : blocks.front().size();
        if (row.size() != n)
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(n),
                             lineno);
        current.push_back(std::move(row));
        if (current.size() > n) throw ParseError("block has more than " + std::to_string(n) + " rows", lineno);
    }
    flush();
    if (blocks.empty()) throw ParseError("no rank matrices found", lineno);
    const int n = static_cast<int>(blocks.front().size());
    std::vector<int> ranks;
    for (std::size_t t = 0; t < blocks.size(); ++t) {
        if (int(blocks[t].size()) != n)
            throw ParseError("matrix " + std::to_string(t + 1) + " has " + std::to_string(blocks[t].size()) +
                                 " rows, expected " + std::to_string(n),
                             first_line[t]);
        for (const auto& row : blocks[t]) ranks.insert(ranks.end(), row.begin(), row.end());
    }
    return RankPanel(n, static_cast<int>(blocks.size()), std::move(ranks));
}

RankPanel parse_panel_long(std::istream& is) {
    std::string line;
    int lineno = 0;
    bool header = false;
    std::map<std::tuple<int, int, int>, int> cells;
    int n = 0, T = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (!header) {
            std::string compact;
            for (char c : s)
                if (c != ' ') compact.push_back(c);
            if (compact != "t,i,j,rank") throw ParseError("expected header 't,i,j,rank'", lineno);
            header = true;
            continue;
        }
        const auto v = parse_ints(s, lineno, ',');
        if (v.size() != 4) throw ParseError("expected four comma-separated integers", lineno);
        if (v[0] < 1 || v[1] < 1 || v[2] < 1) throw ParseError("indices are 1-based", lineno);
        if (!cells.emplace(std::make_tuple(v[0], v[1], v[2]), v[3]).second)
            throw ParseError("duplicate entry for (t,i,j)", lineno);
        T = std::max(T, v[0]);
        n = std::max({n, v[1], v[2]});
    }
    if (!header) throw ParseError("empty long-format file", lineno);
    std::vector<int> ranks(std::size_t(T) * n * n, 0);
    for (int t = 1; t <= T; ++t)
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                auto it = cells.find({t, i, j});
                if (it == cells.end()) {
                    if (i != j) throw ValidationError("missing rank for j=" + std::to_string(j), t - 1, i - 1);
                    continue;
                }
                ranks[(std::size_t(t - 1) * n + (i - 1)) * n + (j - 1)] = it->second;
            }
    return RankPanel(n, T, std::move(ranks));
}

RankPanel load_panel(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open panel file " + path.string());
    std::string line;
    bool is_long = false;
    while (std::getline(in, line)) {
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        is_long = s.find(',') != std::string::npos || s[0] == 't';
        break;
    }
    in.clear();
    in.seekg(0);
    return is_long ? parse_panel_long(in) : parse_panel_block(in);
}

void write_panel_block(const RankPanel& panel, std::ostream& os) {
    for (int t = 0; t < panel.T(); ++t) {
        if (t) os << '\n';
        for (int i = 0; i < panel.n(); ++i) {
            for (int j = 0; j < panel.n(); ++j) os << (j ? " " : "") << panel.rank(t, i, j);
            os << '\n';
        }
    }
}

void write_panel_long(const RankPanel& panel, std::ostream& os) {
    os << "t,i,j,rank\n";
    for (int t = 0; t < panel.T(); ++t)
        for (int i = 0; i < panel.n(); ++i)
            for (int j = 0; j < panel.n(); ++j)
                if (i != j) os << t + 1 << ',' << i + 1 << ',' << j + 1 << ',' << panel.rank(t, i, j) << '\n';
}

void save_panel(const RankPanel& panel, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_panel_block(panel, out);
}

std::size_t store_record_width(int n, int T, int p) {
    return 4 + std::size_t(T - 1) + n + std::size_t(T) * n * p;
}

std::vector<std::string> store_columns(int n, int T, int p) {
    std::vector<std::string> c{"iteration", "theta", "tau0", "tau1"};
    for (int t = 2; t <= T; ++t) c.push_back("tau" + std::to_string(t));
    for (int i = 1; i <= n; ++i) c.push_back("r" + std::to_string(i));
    for (int t = 1; t <= T; ++t)
        for (int i = 1; i <= n; ++i)
            for (int d = 1; d <= p; ++d)
                c.push_back("X_" + std::to_string(t) + "_" + std::to_string(i) + "_" + std::to_string(d));
    return c;
}

namespace {

static_assert(std::endian::native == std::endian::little, "sample store assumes a little-endian host");

void write_doubles(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
}

}  // namespace

StoreWriter::StoreWriter(const fs::path& dir, int n, int T, int p) : dir_(dir), n_(n), T_(T), p_(p) {
    fs::create_directories(dir_);
    draws_.open(dir_ / "draws.bin", std::ios::binary | std::ios::trunc);
    if (!draws_) throw ConfigError("cannot write sample store in " + dir_.string());
}

void StoreWriter::append(const PosteriorSample& s) {
    if (closed_) throw ConfigError("sample store is already closed");
    if (s.X.n() != n_ || s.X.T() != T_ || s.X.p() != p_) throw ConfigError("sample shape does not match store");
    std::vector<double> rec;
    rec.reserve(store_record_width(n_, T_, p_));
    rec.push_back(double(s.iteration));
    rec.push_back(s.params.theta);
    rec.push_back(s.params.tau0);
    rec.push_back(s.params.tau1);
    rec.insert(rec.end(), s.params.tau.begin(), s.params.tau.end());
    rec.insert(rec.end(), s.params.r.begin(), s.params.r.end());
    rec.insert(rec.end(), s.X.values().begin(), s.X.values().end());
    write_doubles(draws_, rec);
    ++count_;
}

void StoreWriter::annotate(const std::string& key, const std::string& json_value) {
    extra_.emplace_back(key, json_value);
}

void StoreWriter::close() {
    if (closed_) return;
    closed_ = true;
    draws_.close();
    json m;
    m["format"] = kStoreFormat;
    m["version"] = kStoreVersion;
    m["n"] = n_;
    m["T"] = T_;
    m["p"] = p_;
    m["count"] = count_;
    m["draws"] = "draws.bin";
    m["encoding"] = "float64-le";
    m["columns"] = store_columns(n_, T_, p_);
    for (const auto& [k, v] : extra_) m[k] = json::parse(v);
    std::ofstream out(dir_ / "manifest.json");
    out << m.dump(2) << '\n';
}

StoreWriter::~StoreWriter() {
    try {
        close();
    } catch (...) {
    }
}

void write_store(const fs::path& dir, const std::vector<PosteriorSample>& samples) {
    if (samples.empty()) throw ConfigError("write_store: no samples");
    const auto& X = samples.front().X;
    StoreWriter w(dir, X.n(), X.T(), X.p());
    for (const auto& s : samples) w.append(s);
    w.close();
}

SampleStore read_store(const fs::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw ConfigError("no sample store at " + dir.string());
    std::stringstream buf;
    buf << mf.rdbuf();
    json m;
    try {
        m = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sample store manifest is not valid JSON: ") + e.what());
    }
    if (m.value("format", "") != kStoreFormat) throw ConfigError("not a sample store: " + dir.string());
    if (m.value("version", 0) != kStoreVersion)
        throw ConfigError("sample store version " + std::to_string(m.value("version", 0)) + " is not supported");

    SampleStore store;
    store.manifest = buf.str();
    store.n = m.at("n");
    store.T = m.at("T");
    store.p = m.at("p");
    const std::size_t count = m.at("count");
    const std::size_t width = store_record_width(store.n, store.T, store.p);

    std::ifstream in(dir / m.value("draws", "draws.bin"), std::ios::binary);
    if (!in) throw ConfigError("sample store is missing its draws file");
    std::vector<double> rec(width);
    store.samples.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        in.read(reinterpret_cast<char*>(rec.data()), std::streamsize(width * sizeof(double)));
        if (!in) throw ConfigError("sample store draws file is truncated");
        PosteriorSample ps;
        std::size_t k = 0;
        ps.iteration = long(rec[k++]);
        ps.params.theta = rec[k++];
        ps.params.tau0 = rec[k++];
        ps.params.tau1 = rec[k++];
        ps.params.tau.assign(rec.begin() + long(k), rec.begin() + long(k + store.T - 1));
        k += store.T - 1;
        ps.params.r.assign(rec.begin() + long(k), rec.begin() + long(k + store.n));
        k += store.n;
        ps.X = LatentTrajectories(store.T, store.n, store.p, std::vector<double>(rec.begin() + long(k), rec.end()));
        store.samples.push_back(std::move(ps));
    }
    return store;
}

void write_traces_csv(const Traces& traces, std::ostream& os) {
    os << "iteration";
    for (const auto& name : traces.names) os << ',' << name;
    os << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t it = 0; it < traces.rows.size(); ++it) {
        os << it + 1;
        for (double v : traces.rows[it]) os << ',' << v;
        os << '\n';
    }
}

}  // namespace lsrank
