#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsrank/core.hpp"
#include "lsrank/sampler.hpp"

namespace lsrank {

/// Malformed input text; carries the 1-based line number.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, int line);
    int line() const { return line_; }

private:
    int line_;
};

/// Block format: T whitespace-separated n x n integer matrices separated by
/// blank lines. Lines starting with '#' are comments.
RankPanel parse_panel_block(std::istream& is);
/// Long format: header `t,i,j,rank`, then one 1-based row per ordered pair
/// (diagonal pairs may be omitted).
RankPanel parse_panel_long(std::istream& is);
/// Picks the format from the first non-comment line.
RankPanel load_panel(const std::filesystem::path& path);

void write_panel_block(const RankPanel& panel, std::ostream& os);
void write_panel_long(const RankPanel& panel, std::ostream& os);
void save_panel(const RankPanel& panel, const std::filesystem::path& path);

inline constexpr int kStoreVersion = 1;
inline constexpr const char* kStoreFormat = "lsrank-sample-store";

/// Posterior sample store: a directory holding manifest.json and draws.bin.
/// draws.bin is a flat little-endian float64 file, one record per draw:
/// iteration, theta, tau0, tau1, tau_2..tau_T, r_1..r_n, X in (t, i, d) order.
struct SampleStore {
    int n = 0, T = 0, p = 0;
    std::vector<PosteriorSample> samples;
    std::string manifest;  // raw JSON text
};

std::size_t store_record_width(int n, int T, int p);
std::vector<std::string> store_columns(int n, int T, int p);

class StoreWriter {
public:
    /// Creates dir (if needed) and truncates any previous draws.
    StoreWriter(const std::filesystem::path& dir, int n, int T, int p);
    void append(const PosteriorSample& s);
    /// Adds a key to the manifest (value is raw JSON text).
    void annotate(const std::string& key, const std::string& json_value);
    /// Writes the manifest; also run by the destructor.
    void close();
    ~StoreWriter();

private:
    std::filesystem::path dir_;
    int n_, T_, p_;
    std::size_t count_ = 0;
    std::ofstream draws_;
    std::vector<std::pair<std::string, std::string>> extra_;
    bool closed_ = false;
};

void write_store(const std::filesystem::path& dir, const std::vector<PosteriorSample>& samples);
SampleStore read_store(const std::filesystem::path& dir);

void write_traces_csv(const Traces& traces, std::ostream& os);

}  // namespace lsrank
