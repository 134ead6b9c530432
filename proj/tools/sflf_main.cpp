// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

// sflf: bake, render, compare and serve spherical light fields.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sflf/baker.hpp"
#include "sflf/error.hpp"
#include "sflf/frame_server.hpp"
#include "sflf/lightfield.hpp"
#include "sflf/metrics.hpp"
#include "sflf/render.hpp"
#include "sflf/scene.hpp"
#include "sflf/tooling.hpp"

namespace {

using namespace sflf;

struct PoseArgs {
    std::string pose;
    double fov = 45.0;
    std::string size = "256x256";

    void add(CLI::App &cmd) {
        cmd.add_option("--pose", pose, "eye,look_at,up as 9 comma-separated numbers")->required();
        cmd.add_option("--fov", fov, "vertical field of view in degrees");
        cmd.add_option("--size", size, "WxH");
    }
    Camera camera() const {
        const auto [w, h] = parse_size(size);
        return parse_pose(pose, fov, w, h);
    }
};

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Spherical light field tools"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0: all cores)");

    // bake
    auto *bake_cmd = app.add_subcommand("bake", "path-trace a light field");
    std::string scene_path, materials_path, out_path, center = "0,0,0";
    BakeConfig cfg;
    bool quiet = false;
    bake_cmd->add_option("--scene", scene_path, "OBJ mesh")->required();
    bake_cmd->add_option("--materials", materials_path, "material sidecar (default: <mesh>.materials)");
    bake_cmd->add_option("--out", out_path, "output .lplf")->required();
    bake_cmd->add_option("--m", cfg.m, "origin points");
    bake_cmd->add_option("--n", cfg.n, "direction points");
    bake_cmd->add_option("--radius", cfg.radius, "bounding sphere radius");
    bake_cmd->add_option("--center", center, "bounding sphere center x,y,z");
    bake_cmd->add_flag("--hemisphere", cfg.hemisphere_only, "store only origins with z > 0");
    bake_cmd->add_option("--spp", cfg.spp, "samples per texel");
    bake_cmd->add_option("--depth", cfg.max_depth, "diffuse bounces");
    bake_cmd->add_option("--seed", cfg.seed, "random seed");
    bake_cmd->add_flag("--no-containment", [&](std::int64_t) { cfg.require_containment = false; },
                       "allow geometry outside the sphere");
    bake_cmd->add_flag("--quiet", quiet, "no progress output");

    // render
    auto *render_cmd = app.add_subcommand("render", "render a view from a light field");
    std::string field_path, mode_name = "filtered";
    PoseArgs render_pose;
    render_cmd->add_option("--field", field_path, ".lplf file")->required();
    render_pose.add(*render_cmd);
    render_cmd->add_option("--mode", mode_name, "nearest|filtered");
    render_cmd->add_option("--out", out_path, "output PNG")->required();

    // truth
    auto *truth_cmd = app.add_subcommand("truth", "path-trace a reference image");
    PoseArgs truth_pose;
    std::uint32_t truth_spp = 1024, truth_depth = 5;
    std::uint64_t truth_seed = 0;
    truth_cmd->add_option("--scene", scene_path, "OBJ mesh")->required();
    truth_cmd->add_option("--materials", materials_path, "material sidecar");
    truth_pose.add(*truth_cmd);
    truth_cmd->add_option("--spp", truth_spp, "samples per pixel");
    truth_cmd->add_option("--depth", truth_depth, "diffuse bounces");
    truth_cmd->add_option("--seed", truth_seed, "random seed");
    truth_cmd->add_option("--out", out_path, "output PNG")->required();

    // compare
    auto *compare_cmd = app.add_subcommand("compare", "masked SSIM between two PNGs");
    std::string a_path, b_path, mask_source = "from-alpha";
    compare_cmd->add_option("--a", a_path, "image whose alpha gives the mask")->required();
    compare_cmd->add_option("--b", b_path, "reference image")->required();
    compare_cmd->add_option("--mask", mask_source, "from-alpha|none")
        ->check(CLI::IsMember({"from-alpha", "none"}));
    compare_cmd->add_option("--out", out_path, "JSON report");

    // dataset
    auto *dataset_cmd = app.add_subcommand("dataset", "write (input, target, mask) PNG pairs");
    DatasetOptions dataset;
    dataset_cmd->add_option("--scene", scene_path, "OBJ mesh")->required();
    dataset_cmd->add_option("--materials", materials_path, "material sidecar");
    dataset_cmd->add_option("--field", field_path, ".lplf file")->required();
    dataset_cmd->add_option("--views", dataset.views, "number of views");
    dataset_cmd->add_option("--seed", dataset.seed, "random seed");
    dataset_cmd->add_option("--spp", dataset.spp, "reference samples per pixel");
    dataset_cmd->add_option("--size", render_pose.size, "WxH");
    dataset_cmd->add_option("--out", out_path, "output directory")->required();

    // serve
    auto *serve_cmd = app.add_subcommand("serve", "HTTP frame server");
    ServerOptions server;
    serve_cmd->add_option("--field", field_path, ".lplf file")->required();
    serve_cmd->add_option("--port", server.port, "TCP port (0: any)");
    serve_cmd->add_option("--host", server.host, "bind address");
    serve_cmd->add_option("--workers", server.workers, "request threads");
    serve_cmd->add_option("--allow-origin", server.allow_origin, "CORS origin (empty disables)");

    // scene
    auto *scene_cmd = app.add_subcommand("scene", "write a built-in sample scene");
    std::string scene_kind = "desk";
    double furnace_emission = 0.25, furnace_albedo = 0.5, furnace_radius = 2.0;
    scene_cmd->add_option("--kind", scene_kind, "desk|furnace")->check(CLI::IsMember({"desk", "furnace"}));
    scene_cmd->add_option("--emission", furnace_emission, "furnace wall emission");
    scene_cmd->add_option("--albedo", furnace_albedo, "furnace wall albedo");
    scene_cmd->add_option("--radius", furnace_radius, "furnace enclosure radius");
    scene_cmd->add_option("--out", out_path, "output .obj (a .materials sidecar is written next to it)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    const auto scene_materials = [&]() -> std::optional<std::filesystem::path> {
        if (materials_path.empty()) return std::nullopt;
        return materials_path;
    };

    try {
        if (*bake_cmd) {
            cfg.center = parse_vec3(center);
            const Scene scene = load_scene(scene_path, scene_materials());
            BakeOptions options;
            options.threads = threads;
            if (!quiet) {
                options.progress = [](std::uint64_t done, std::uint64_t total) {
                    std::fprintf(stderr, "\rbake %llu/%llu rows", static_cast<unsigned long long>(done),
                                 static_cast<unsigned long long>(total));
                    if (done == total) std::fputc('\n', stderr);
                };
            }
            BakeDiagnostics diag;
            const LightField field = bake(scene, cfg, options, &diag);
            const auto bytes = save(field, out_path);
            std::printf("wrote %s: %llu bytes, %llu texels, %llu non-finite samples, %zu degenerate texels\n",
                        out_path.c_str(), static_cast<unsigned long long>(bytes),
                        static_cast<unsigned long long>(diag.texels),
                        static_cast<unsigned long long>(diag.nonfinite_samples), diag.degenerate_texels.size());
        } else if (*render_cmd) {
            const auto mode = parse_sample_mode(mode_name);
            if (!mode) throw ContractViolation("--mode must be nearest or filtered");
            const LightField field = load(field_path);
            const FrameResult frame = render_frame(field, render_pose.camera(), *mode, threads);
            write_file(out_path, frame_png(frame));
            std::printf("wrote %s: coverage %.3f%%, %llu texel fetches\n", out_path.c_str(), frame.coverage_percent(),
                        static_cast<unsigned long long>(frame.stats.texel_fetches));
        } else if (*truth_cmd) {
            const Scene scene = load_scene(scene_path, scene_materials());
            const Image image =
                render_ground_truth(scene, truth_pose.camera(), truth_spp, truth_seed, truth_depth, threads);
            write_file(out_path, encode_png(to_srgb8(image)));
            std::printf("wrote %s\n", out_path.c_str());
        } else if (*compare_cmd) {
            const Rgba8Image a = decode_png(read_file(a_path));
            const Rgba8Image b = decode_png(read_file(b_path));
            const auto mask = mask_source == "from-alpha" ? mask_from_alpha(a) : std::vector<std::uint8_t>{};
            const std::string report = compare_images(a, b, mask).to_json();
            if (!out_path.empty()) write_text(out_path, report + "\n");
            std::printf("%s\n", report.c_str());
        } else if (*dataset_cmd) {
            const auto [w, h] = parse_size(render_pose.size);
            dataset.width = w;
            dataset.height = h;
            dataset.threads = threads;
            const Scene scene = load_scene(scene_path, scene_materials());
            const LightField field = load(field_path);
            write_dataset(scene, field, dataset, out_path);
            std::printf("wrote %u pairs to %s\n", dataset.views, out_path.c_str());
        } else if (*serve_cmd) {
            FrameServer srv(server);
            srv.load_field_async(field_path);
            const int port = srv.bind();
            std::fprintf(stderr, "listening on %s:%d\n", server.host.c_str(), port);
            srv.listen();
        } else if (*scene_cmd) {
            const Scene scene = scene_kind == "desk"
                                    ? desk_scene()
                                    : furnace_scene(furnace_radius, furnace_albedo, furnace_emission);
            std::filesystem::path obj(out_path);
            std::ofstream mesh(obj), mats(std::filesystem::path(obj).replace_extension(".materials"));
            if (!mesh || !mats) throw std::runtime_error("cannot write " + out_path);
            write_obj(mesh, scene);
            write_materials(mats, scene);
            std::printf("wrote %s (%zu triangles)\n", out_path.c_str(), scene.triangles.size());
        }
    } catch (const BakeError &e) {
        std::fprintf(stderr, "sflf: bake failed: %s\n", e.what());
        return 3;
    } catch (const ContractViolation &e) {
        std::fprintf(stderr, "sflf: invalid argument: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "sflf: %s\n", e.what());
        return 1;
    }
    return 0;
}
