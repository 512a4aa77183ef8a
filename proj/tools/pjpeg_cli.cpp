/*
Copyright 2026 the pjpeg authors

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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pjpeg/pjpeg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int exit_code(pjpeg::Errc e) { return 10 + static_cast<int>(e); }

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw pjpeg::Error(pjpeg::Errc::IoError, "cannot open " + path);
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(f),
                                std::istreambuf_iterator<char>());
}

std::vector<uint64_t> parse_list(const std::string& csv) {
    std::vector<uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

struct CommonOpts {
    uint64_t subseq_bits = 1024;
    uint32_t seq_len = 256;
    unsigned workers = 1;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--subseq-bits", o.subseq_bits, "subsequence size in bits (multiple of 32)");
    app->add_option("--seq-len", o.seq_len, "subsequences per sequence (b)");
    app->add_option("--workers", o.workers, "worker threads");
}

int cmd_decode(const std::string& input, const std::string& output,
               const CommonOpts& o, const std::string& colorspace) {
    auto bytes = read_file(input);
    pjpeg::DecodeConfig cfg;
    cfg.subsequence_bits = o.subseq_bits;
    cfg.sequence_length_b = o.seq_len;
    cfg.worker_count = o.workers;
    pjpeg::DecodeSuccess res = pjpeg::decode_single(bytes, cfg);

    if (colorspace == "ycbcr" && res.planes.planes.size() == 3) {
        static const char* names[3] = {".y.pgm", ".cb.pgm", ".cr.pgm"};
        for (size_t i = 0; i < 3; ++i) {
            pjpeg::RgbImage p;
            p.width = res.planes.planes[i].width;
            p.height = res.planes.planes[i].height;
            p.channels = 1;
            p.pixels = res.planes.planes[i].samples;
            pjpeg::write_pnm(output + names[i], p);
        }
        return 0;
    }
    pjpeg::RgbImage img = pjpeg::upsample_and_convert(res.planes);
    if (colorspace == "gray" && img.channels == 3) {
        pjpeg::RgbImage g;
        g.width = res.planes.planes[0].width;
        g.height = res.planes.planes[0].height;
        g.channels = 1;
        g.pixels = res.planes.planes[0].samples;
        img = std::move(g);
    }
    pjpeg::write_pnm(output, img);
    return 0;
}

int cmd_inspect(const std::string& input, const CommonOpts& o) {
    auto bytes = read_file(input);
    pjpeg::ParsedImage img = pjpeg::parse(bytes);
    const auto& f = img.frame;
    std::cout << "size: " << f.width << "x" << f.height << "\n"
              << "components: " << f.components.size() << "\n";
    for (const auto& c : f.components)
        std::cout << "  id " << int(c.id) << " sampling " << int(c.h_sampling) << "x"
                  << int(c.v_sampling) << " quant " << int(c.quant_table_id) << " dc "
                  << int(c.dc_table_id) << " ac " << int(c.ac_table_id) << "\n";
    std::cout << "mcu: " << f.mcu_width << "x" << f.mcu_height << ", grid " << f.mcus_x << "x"
              << f.mcus_y << " (" << f.mcus_x * f.mcus_y << " MCUs)\n"
              << "data units per MCU: " << f.data_units_per_mcu << "\n"
              << "total data units: " << f.total_data_units() << "\n";
    int nq = 0, ndc = 0, nac = 0;
    for (const auto& q : img.quant) nq += q.present;
    for (const auto& t : img.dc_tables) ndc += t.present;
    for (const auto& t : img.ac_tables) nac += t.present;
    std::cout << "tables: " << nq << " quant, " << ndc << " DC huffman, " << nac
              << " AC huffman\n"
              << "scan bits: " << img.segment.bit_length << "\n";
    pjpeg::ScanPartition part =
        pjpeg::partition(img.segment, {o.subseq_bits, o.seq_len});
    std::cout << "partition (s*32=" << o.subseq_bits << ", b=" << o.seq_len
              << "): N=" << part.N << " subsequences, B=" << part.B << " sequences\n";
    return 0;
}

int cmd_bench(const std::string& dir, const CommonOpts& o, const std::string& subseq_list,
              const std::string& worker_list, unsigned warmup, unsigned iterations,
              const std::string& json_path, const std::string& csv_path) {
    std::vector<std::vector<uint8_t>> files;
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    uint64_t compressed_bytes = 0;
    for (const auto& p : paths) {
        files.push_back(read_file(p.string()));
        compressed_bytes += files.back().size();
    }
    if (files.empty())
        throw pjpeg::Error(pjpeg::Errc::EmptyCorpus, "no files in " + dir);

    std::vector<uint64_t> sweeps =
        subseq_list.empty() ? std::vector<uint64_t>{o.subseq_bits} : parse_list(subseq_list);
    std::vector<uint64_t> workers =
        worker_list.empty() ? std::vector<uint64_t>{o.workers} : parse_list(worker_list);

    json report = json::array();
    for (uint64_t sb : sweeps)
        for (uint64_t w : workers) {
            pjpeg::DecodeConfig cfg;
            cfg.subsequence_bits = sb;
            cfg.sequence_length_b = o.seq_len;
            cfg.worker_count = static_cast<unsigned>(w);

            for (unsigned i = 0; i < warmup; ++i) pjpeg::decode_batch(files, cfg);

            double best_ms = 0;
            pjpeg::StageTimings stages;
            uint64_t checksum = 0;
            uint64_t failures = 0;
            for (unsigned it = 0; it < iterations; ++it) {
                auto t0 = std::chrono::steady_clock::now();
                auto outcomes = pjpeg::decode_batch(files, cfg);
                auto t1 = std::chrono::steady_clock::now();
                double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                pjpeg::StageTimings st;
                uint64_t ck = 1469598103934665603ull;
                uint64_t fails = 0;
                for (const auto& oc : outcomes) {
                    if (const auto* s = std::get_if<pjpeg::DecodeSuccess>(&oc)) {
                        st += s->timings;
                        ck ^= pjpeg::planes_checksum(s->planes);
                        ck *= 1099511628211ull;
                    } else {
                        ++fails;
                    }
                }
                if (it == 0 || ms < best_ms) {
                    best_ms = ms;
                    stages = st;
                }
                checksum = ck;
                failures = fails;
            }

            double mb = double(compressed_bytes) / (1024.0 * 1024.0);
            json row = {
                {"batch", files.size()},
                {"config", {{"subseq_bits", sb}, {"b", o.seq_len}, {"workers", w}}},
                {"wall_ms", best_ms},
                {"stages",
                 {{"parse", stages.parse},
                  {"sync", stages.sync},
                  {"write", stages.write},
                  {"dc", stages.dc},
                  {"idct", stages.idct},
                  {"extract", stages.extract}}},
                {"mb_per_s", mb / (best_ms / 1000.0)},
                {"checksum", checksum},
            };
            if (failures) row["failures"] = failures;
            report.push_back(row);
            std::cout << report.back().dump() << "\n";
        }

    if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << report.dump(2) << "\n";
    }
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        f << "batch,subseq_bits,b,workers,wall_ms,parse,sync,write,dc,idct,extract,mb_per_s,"
             "checksum\n";
        for (const auto& r : report)
            f << r["batch"] << "," << r["config"]["subseq_bits"] << "," << r["config"]["b"]
              << "," << r["config"]["workers"] << "," << r["wall_ms"] << ","
              << r["stages"]["parse"] << "," << r["stages"]["sync"] << ","
              << r["stages"]["write"] << "," << r["stages"]["dc"] << ","
              << r["stages"]["idct"] << "," << r["stages"]["extract"] << ","
              << r["mb_per_s"] << "," << r["checksum"] << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel baseline JPEG decoder"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input, output, colorspace = "rgb";
    auto* dec = app.add_subcommand("decode", "decode a JPEG file to PPM/PGM");
    dec->add_option("input", input)->required();
    dec->add_option("output", output)->required();
    add_common(dec, opts);
    dec->add_option("--colorspace", colorspace, "rgb | gray | ycbcr")
        ->check(CLI::IsMember({"rgb", "gray", "ycbcr"}));

    CommonOpts iopts;
    std::string iinput;
    auto* ins = app.add_subcommand("inspect", "print container and partition info");
    ins->add_option("input", iinput)->required();
    add_common(ins, iopts);

    CommonOpts bopts;
    std::string bdir, subseq_list, worker_list, json_path, csv_path;
    unsigned warmup = 1, iterations = 3;
    auto* ben = app.add_subcommand("bench", "benchmark a corpus directory");
    ben->add_option("dir", bdir)->required();
    add_common(ben, bopts);
    ben->add_option("--sweep-subseq-bits", subseq_list, "comma separated subsequence sizes");
    ben->add_option("--sweep-workers", worker_list, "comma separated worker counts");
    ben->add_option("--warmup", warmup, "warmup iterations (excluded from timings)");
    ben->add_option("--iterations", iterations, "timed iterations (best is reported)");
    ben->add_option("--json", json_path, "write JSON report to this path");
    ben->add_option("--csv", csv_path, "write CSV report to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dec) return cmd_decode(input, output, opts, colorspace);
        if (*ins) return cmd_inspect(iinput, iopts);
        if (*ben)
            return cmd_bench(bdir, bopts, subseq_list, worker_list, warmup, iterations,
                             json_path, csv_path);
    } catch (const pjpeg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
