#include "cohsim/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace cohsim {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

namespace {

std::string canonical_param_block(const RunManifest& m) {
    std::string block = m.subcommand + "\n" + m.version + "\n";
    for (const auto& [k, v] : m.params) block += k + "=" + v + "\n";
    block += "seed=" + std::to_string(m.seed) + "\n";
    return block;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::string RunManifest::digest() const { return fnv1a64_hex(canonical_param_block(*this)); }

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["version"] = version;
    j["params"] = params;
    j["seed"] = seed;
    j["digest"] = digest();
    j["kernel_backend"] = kernel_backend;
    j["threads"] = threads;
    j["outputs"] = outputs;
    j["wall_time_s"] = wall_time_s;
    return j.dump(2) + "\n";
}

void RunManifest::write_atomic(const std::string& path) const {
    atomic_write_text(path, to_json());
}

std::complex<double> parse_complex(const std::string& text) {
    const std::string s = text;
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    auto parse_part = [](const std::string& part, bool imag_unit_ok) {
        if (imag_unit_ok && (part.empty() || part == "+")) return 1.0;
        if (imag_unit_ok && part == "-") return -1.0;
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument("bad complex literal");
        return v;
    };
    try {
        if (s.back() == 'i' || s.back() == 'I') {
            const std::string body = s.substr(0, s.size() - 1);
            // split at the last +/- that is not a leading sign or an exponent sign
            std::size_t split = std::string::npos;
            for (std::size_t p = body.size(); p-- > 1;) {
                if ((body[p] == '+' || body[p] == '-') &&
                    body[p - 1] != 'e' && body[p - 1] != 'E') {
                    split = p;
                    break;
                }
            }
            if (split == std::string::npos) return {0.0, parse_part(body, true)};
            return {parse_part(body.substr(0, split), false),
                    parse_part(body.substr(split), true)};
        }
        return {parse_part(s, false), 0.0};
    } catch (const std::exception&) {
        throw std::invalid_argument("bad complex literal '" + text +
                                    "' (expected forms: 2, -1.5, 2i, 1+2i)");
    }
}

std::string format_complex(std::complex<double> z) {
    if (z.imag() == 0.0) return format_double(z.real());
    std::string out = format_double(z.real());
    if (z.imag() >= 0.0) out += "+";
    return out + format_double(z.imag()) + "i";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path)
    : path_(path), tmp_path_(path + ".tmp") {}

CsvWriter::~CsvWriter() {
    if (!closed_) {
        // Abandoned writer (error path): leave no partial output behind.
        std::error_code ec;
        std::filesystem::remove(tmp_path_, ec);
    }
}

void CsvWriter::comment(const std::string& line) { buffer_ += "# " + line + "\n"; }

void CsvWriter::columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        buffer_ += names[i];
        buffer_ += (i + 1 == names.size()) ? "\n" : ",";
    }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        buffer_ += cells[i];
        buffer_ += (i + 1 == cells.size()) ? "\n" : ",";
    }
}

void CsvWriter::close() {
    if (closed_) return;
    atomic_write_text(path_, buffer_);
    closed_ = true;
}

}  // namespace cohsim
