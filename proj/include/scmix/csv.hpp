#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "scmix/types.hpp"

namespace scmix {

/// Round-trip-safe decimal representation; fixed formatting keeps output
/// files byte-identical across runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_u64_hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& comment,
              const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw Error("cannot open output file '" + path + "'");
        if (!comment.empty()) out_ << "# " << comment << "\n";
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

}  // namespace scmix
