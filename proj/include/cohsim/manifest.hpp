#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Run manifests and CSV emission for the CLI. Every output CSV carries a
// '#'-prefixed header block with the manifest digest and column units; the
// manifest JSON is written atomically next to the CSV. The digest covers
// only the reproducible fields, so re-running with the same parameters
// yields byte-identical CSVs.

namespace cohsim {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> params;  // canonical (sorted) order
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string kernel_backend;
    int threads = 1;
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;  // excluded from the digest

    // FNV-1a 64 over the canonical parameter block, hex encoded.
    std::string digest() const;
    std::string to_json() const;
    void write_atomic(const std::string& path) const;
};

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

// "re+imi" complex literals: "2", "-1.5", "2i", "1+2i", "1-0.5i", "i".
std::complex<double> parse_complex(const std::string& text);
std::string format_complex(std::complex<double> z);

// Fixed numeric formatting shared by all emitters ("%.12g").
std::string format_double(double v);

class CsvWriter {
  public:
    // Opens via a temp file; rename happens in close() so readers never see
    // a partial file.
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();

    void comment(const std::string& line);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void close();

  private:
    std::string path_;
    std::string tmp_path_;
    std::string buffer_;
    bool closed_ = false;
};

}  // namespace cohsim
