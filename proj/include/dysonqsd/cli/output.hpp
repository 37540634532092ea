/*
   Copyright 2026 The dysonqsd Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "dysonqsd/errors.hpp"

namespace dysonqsd::cli {

/// Fixed 17-significant-digit decimal; "inf" / "-inf" / "nan" otherwise.
inline std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// In-memory CSV: `,` separator, `\n` line endings, header first.
class CsvTable {
public:
    explicit CsvTable(const std::vector<std::string>& header) : columns_(header.size())
    {
        row_start();
        for (const auto& h : header) {
            cell(h);
        }
        row_end();
    }

    CsvTable& row_start()
    {
        in_row_ = 0;
        return *this;
    }
    CsvTable& cell(const std::string& s)
    {
        if (in_row_++ > 0) {
            text_ += ',';
        }
        text_ += s;
        return *this;
    }
    CsvTable& cell(double v) { return cell(format_number(v)); }
    CsvTable& cell(std::size_t v) { return cell(std::to_string(v)); }
    void row_end()
    {
        if (in_row_ != columns_) {
            throw InvalidArgument("CSV row has " + std::to_string(in_row_) + " cells, expected " +
                                  std::to_string(columns_));
        }
        text_ += '\n';
    }
    /// Appends rows produced elsewhere (already terminated by '\n').
    void append_raw(const std::string& rows) { text_ += rows; }

    const std::string& text() const { return text_; }

private:
    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::string text_;
};

/// Writes via a temporary file in the same directory and renames it into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("write to " + tmp + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

/// Output files of one run, in write order, with their checksums.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content)
    {
        atomic_write(dir_ / name, content);
        checksums_[name] = sha256_hex(content);
        names_.push_back(name);
    }

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::map<std::string, std::string>& checksums() const { return checksums_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
    std::map<std::string, std::string> checksums_;
};

}  // namespace dysonqsd::cli
