#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "kinmodes/evolution.hpp"
#include "kinmodes/spectral.hpp"

namespace kinmodes {

// 17 significant digits: round-trips doubles exactly and keeps every emitted
// file bit-identical across runs.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary); // LF endings regardless of platform
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
}

inline std::string branch_csv(const SpectralBranch& br) {
    std::string s = "label,eta,re_mu,im_mu,defect,residual";
    for (int k = 0; k < 5; ++k)
        s += ",C_" + std::to_string(k) + "re,C_" + std::to_string(k) + "im";
    s += "\n";
    const std::string label = to_string(br.label);
    for (const auto& smp : br.samples) {
        s += label + "," + fmt17(smp.eta) + "," + fmt17(smp.mu.real()) + "," +
             fmt17(smp.mu.imag()) + "," + fmt17(smp.defect) + "," + fmt17(smp.residual);
        for (int k = 0; k < 5; ++k)
            s += "," + fmt17(smp.C[k].real()) + "," + fmt17(smp.C[k].imag());
        s += "\n";
    }
    return s;
}

inline std::string trajectory_csv(const MomentTrajectory& tr) {
    std::string s = "t,re_rho,im_rho,re_m1,im_m1,re_m2,im_m2,re_m3,im_m3,re_theta,im_theta,energy\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        s += fmt17(tr.times[k]);
        s += "," + fmt17(tr.rho_hat[k].real()) + "," + fmt17(tr.rho_hat[k].imag());
        for (int d = 0; d < 3; ++d)
            s += "," + fmt17(tr.m_hat[d][k].real()) + "," + fmt17(tr.m_hat[d][k].imag());
        s += "," + fmt17(tr.theta_hat[k].real()) + "," + fmt17(tr.theta_hat[k].imag());
        s += "," + fmt17(tr.energy[k]) + "\n";
    }
    return s;
}

} // namespace kinmodes
