#include "artifacts.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <system_error>
#include <thread>
#include <type_traits>

#include <nlohmann/json.hpp>

#include <otfsprony/errors.hpp>

namespace otfsprony::detail
{

std::string format_double(double x)
{
    if (std::isnan(x))
    {
        return "nan";
    }
    if (std::isinf(x))
    {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace
{

void append_csv_text(std::string& out, const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos)
    {
        out += text;
        return;
    }
    out += '"';
    for (const char c : text)
    {
        if (c == '"')
        {
            out += '"';
        }
        out += c;
    }
    out += '"';
}

} // namespace

void Table::add(std::vector<Cell> row)
{
    if (row.size() != header.size())
    {
        throw InvalidArgument("Table: row has " + std::to_string(row.size()) +
                              " cells, header has " +
                              std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const
{
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c)
    {
        if (c > 0)
        {
            out += ',';
        }
        append_csv_text(out, header[c]);
    }
    out += '\n';
    for (const auto& row : rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            if (c > 0)
            {
                out += ',';
            }
            std::visit(
                [&out](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>)
                    {
                        out += format_double(v);
                    }
                    else if constexpr (std::is_same_v<V, long long>)
                    {
                        out += std::to_string(v);
                    }
                    else
                    {
                        append_csv_text(out, v);
                    }
                },
                row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string Table::to_json() const
{
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& row : rows)
    {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>)
                    {
                        obj[header[c]] = std::isfinite(v) ? nlohmann::ordered_json(v)
                                                          : nlohmann::ordered_json();
                    }
                    else
                    {
                        obj[header[c]] = v;
                    }
                },
                row[c]);
        }
        array.push_back(std::move(obj));
    }
    return array.dump(2) + "\n";
}

void write_file(const std::filesystem::path& dir,
                const std::filesystem::path& relative, std::string_view content)
{
    const std::filesystem::path full = dir / relative;
    std::error_code ec;
    std::filesystem::create_directories(full.parent_path(), ec);
    if (ec)
    {
        throw IoError("cannot create directory " + full.parent_path().string() +
                      ": " + ec.message());
    }
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw IoError("cannot open " + full.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
    {
        throw IoError("write failed: " + full.string());
    }
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn)
{
    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!first_error)
                        {
                            first_error = std::current_exception();
                        }
                        failed = true;
                    }
                }
            });
        }
    }
    if (first_error)
    {
        std::rethrow_exception(first_error);
    }
}

} // namespace otfsprony::detail
