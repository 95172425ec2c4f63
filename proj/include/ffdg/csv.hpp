#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ffdg::csv {

// Shortest decimal string that round-trips the exact double.
std::string format_double(double v);

// Full-field parse; throws ValidationError naming file and line on failure.
double parse_double(std::string_view field, const std::string& file, std::size_t line_no);
long long parse_int(std::string_view field, const std::string& file, std::size_t line_no);

void split_line(std::string_view line, std::vector<std::string_view>& out);

// Streaming reader for comma-separated files with a mandatory header row.
// Fields are views into an internal line buffer, valid until the next call.
class Reader {
public:
    Reader(const std::string& path, const std::vector<std::string>& expected_header);

    bool next(std::vector<std::string_view>& fields);

    std::size_t line_no() const { return line_no_; }
    const std::string& path() const { return path_; }

private:
    std::ifstream in_;
    std::string path_;
    std::string line_;
    std::size_t line_no_ = 0;
    std::size_t n_cols_ = 0;
};

class Writer {
public:
    explicit Writer(const std::string& path);

    void header(const std::vector<std::string>& names);
    void field(std::string_view v);
    void field(double v);
    void field(long long v);
    void end_row();
    void close();

private:
    std::ofstream out_;
    std::string path_;
    bool row_open_ = false;
};

}  // namespace ffdg::csv
