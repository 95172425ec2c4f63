#include "ffdg/csv.hpp"

#include <charconv>
#include <system_error>

#include "ffdg/errors.hpp"

namespace ffdg::csv {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(std::string_view field, const std::string& file, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ValidationError(file + ":" + std::to_string(line_no) + ": bad numeric cell '" +
                              std::string(field) + "'");
    return v;
}

long long parse_int(std::string_view field, const std::string& file, std::size_t line_no) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ValidationError(file + ":" + std::to_string(line_no) + ": bad integer cell '" +
                              std::string(field) + "'");
    return v;
}

void split_line(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

Reader::Reader(const std::string& path, const std::vector<std::string>& expected_header)
    : in_(path), path_(path) {
    if (!in_) throw ValidationError("cannot open " + path);
    if (!std::getline(in_, line_)) throw ValidationError(path + ": empty file, expected header");
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    std::vector<std::string_view> got;
    split_line(line_, got);
    if (got.size() != expected_header.size())
        throw ValidationError(path + ": header has " + std::to_string(got.size()) +
                              " columns, expected " + std::to_string(expected_header.size()));
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i] != expected_header[i])
            throw ValidationError(path + ": header column " + std::to_string(i + 1) + " is '" +
                                  std::string(got[i]) + "', expected '" + expected_header[i] + "'");
    }
    n_cols_ = expected_header.size();
}

bool Reader::next(std::vector<std::string_view>& fields) {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    split_line(line_, fields);
    if (fields.size() != n_cols_)
        throw ValidationError(path_ + ":" + std::to_string(line_no_) + ": row has " +
                              std::to_string(fields.size()) + " columns, expected " +
                              std::to_string(n_cols_));
    return true;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw ValidationError("cannot write " + path);
}

void Writer::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out_ << ',';
        out_ << names[i];
    }
    out_ << '\n';
}

void Writer::field(std::string_view v) {
    if (row_open_) out_ << ',';
    out_ << v;
    row_open_ = true;
}

void Writer::field(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    field(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

void Writer::field(long long v) { field(std::string_view(std::to_string(v))); }

void Writer::end_row() {
    out_ << '\n';
    row_open_ = false;
}

void Writer::close() {
    out_.close();
    if (!out_) throw ValidationError("write failed for " + path_);
}

}  // namespace ffdg::csv
