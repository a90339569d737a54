#include "gridformer/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridformer/svd.hpp"

namespace gridformer {

namespace {

// 2x2-block index helpers: bus k occupies rows/cols {2k, 2k+1}.
std::vector<int> block_indices(const std::vector<int>& buses) {
    std::vector<int> idx;
    idx.reserve(buses.size() * 2);
    for (int b : buses) {
        idx.push_back(2 * b);
        idx.push_back(2 * b + 1);
    }
    return idx;
}

template <typename Mat>
Mat select(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(rows[i], cols[j]);
    return out;
}

template <typename Mat>
Mat schur_reduce(const Mat& full, const std::vector<int>& keep_blocks,
                 const std::vector<int>& drop_blocks) {
    const std::vector<int> keep = block_indices(keep_blocks);
    const std::vector<int> drop = block_indices(drop_blocks);
    if (drop.empty())
        return select(full, keep, keep);
    const Mat Y1 = select(full, keep, keep);
    const Mat Y2 = select(full, keep, drop);
    const Mat Y3 = select(full, drop, keep);
    const Mat Y4 = select(full, drop, drop);
    Eigen::PartialPivLU<Mat> lu(Y4);
    if (!(lu.rcond() > 1e-12))
        throw SingularInteriorBlock("interior block is numerically singular");
    return Y1 - Y2 * lu.solve(Y3);
}

} // namespace

NetworkModel::NetworkModel(int n_devices, int n_interior, std::vector<Branch> branches,
                           std::vector<double> capacities, double omega0)
    : n_devices_(n_devices), n_interior_(n_interior), branches_(std::move(branches)),
      capacities_(std::move(capacities)), omega0_(omega0) {
    if (n_devices_ < 1 || n_interior_ < 0)
        throw DimensionMismatch("network needs at least one device bus");
    if (!(omega0_ > 0.0))
        throw DimensionMismatch("nominal frequency must be positive");
    if (static_cast<int>(capacities_.size()) != n_devices_)
        throw DimensionMismatch("one capacity per device bus required");
    for (double s : capacities_)
        if (!(s > 0.0))
            throw DimensionMismatch("device capacities must be positive");
    if (branches_.empty())
        throw DimensionMismatch("network needs at least one branch");
    const int ground = ground_bus();
    for (const Branch& br : branches_) {
        if (br.from < 0 || br.from >= ground || br.to < 0 || br.to > ground ||
            br.from == br.to)
            throw DimensionMismatch("branch endpoints out of range");
        if (!(br.b > 0.0))
            throw DimensionMismatch("branch susceptance must be positive");
        if (!(br.tau > 0.0))
            throw NonpositiveTau("branch R/L ratio must be positive");
    }
    // connectivity over non-ground buses through non-ground branches
    std::vector<int> comp(static_cast<std::size_t>(n_buses()));
    std::iota(comp.begin(), comp.end(), 0);
    const std::function<int(int)> find = [&](int v) {
        while (comp[static_cast<std::size_t>(v)] != v)
            v = comp[static_cast<std::size_t>(v)] =
                comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
        return v;
    };
    for (const Branch& br : branches_)
        if (br.to != ground)
            comp[static_cast<std::size_t>(find(br.from))] = find(br.to);
    for (int v = 1; v < n_buses(); ++v)
        if (find(v) != find(0))
            throw DimensionMismatch("network graph is not connected");
}

bool NetworkModel::uniform_tau(double tol) const {
    const double t0 = branches_.front().tau;
    return std::all_of(branches_.begin(), branches_.end(), [&](const Branch& br) {
        return std::abs(br.tau - t0) <= tol;
    });
}

double NetworkModel::mean_tau() const {
    double sum = 0.0;
    for (const Branch& br : branches_)
        sum += br.tau;
    return sum / static_cast<double>(branches_.size());
}

std::vector<int> NetworkModel::interior_buses() const {
    std::vector<int> out(static_cast<std::size_t>(n_interior_));
    std::iota(out.begin(), out.end(), n_devices_);
    return out;
}

NetworkModel NetworkModel::with_device_bus(int interior_bus, double capacity) const {
    return with_device_buses({interior_bus}, {capacity});
}

NetworkModel NetworkModel::with_device_buses(const std::vector<int>& interior_buses,
                                             const std::vector<double>& new_caps) const {
    if (interior_buses.size() != new_caps.size())
        throw DimensionMismatch("one capacity per promoted bus required");
    std::vector<int> promoted = interior_buses;
    std::sort(promoted.begin(), promoted.end());
    if (std::adjacent_find(promoted.begin(), promoted.end()) != promoted.end())
        throw DimensionMismatch("duplicate bus in promotion set");
    for (int t : promoted)
        if (t < n_devices_ || t >= n_buses())
            throw DimensionMismatch("with_device_buses expects interior buses");

    // New numbering: old device buses keep their index, promoted buses
    // become devices n, n+1, ... in ascending old order, remaining
    // interiors follow in old order. The ground index is unchanged.
    const int k = static_cast<int>(promoted.size());
    std::vector<int> map(static_cast<std::size_t>(n_buses() + 1), -1);
    map[static_cast<std::size_t>(ground_bus())] = ground_bus();
    for (int b = 0; b < n_devices_; ++b)
        map[static_cast<std::size_t>(b)] = b;
    int next_dev = n_devices_;
    for (int t : promoted)
        map[static_cast<std::size_t>(t)] = next_dev++;
    int next_int = n_devices_ + k;
    for (int b = n_devices_; b < n_buses(); ++b)
        if (map[static_cast<std::size_t>(b)] < 0)
            map[static_cast<std::size_t>(b)] = next_int++;

    std::vector<Branch> new_branches = branches_;
    for (Branch& br : new_branches) {
        br.from = map[static_cast<std::size_t>(br.from)];
        br.to = map[static_cast<std::size_t>(br.to)];
    }
    std::vector<double> caps = capacities_;
    for (std::size_t i = 0; i < promoted.size(); ++i) {
        // capacities follow the sorted promotion order
        const auto pos = static_cast<std::size_t>(
            std::find(interior_buses.begin(), interior_buses.end(), promoted[i]) -
            interior_buses.begin());
        caps.push_back(new_caps[pos]);
    }
    return {n_devices_ + k, n_interior_ - k, std::move(new_branches), std::move(caps),
            omega0_};
}

Eigen::MatrixXd static_b_matrix(const NetworkModel& net) {
    const int n = net.n_buses();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (const Branch& br : net.branches()) {
        B(br.from, br.from) += br.b;
        if (br.to != net.ground_bus()) {
            B(br.to, br.to) += br.b;
            B(br.from, br.to) -= br.b;
            B(br.to, br.from) -= br.b;
        }
    }
    return B;
}

Eigen::MatrixXcd assemble_dynamic_y(const NetworkModel& net, double omega) {
    const int n = net.n_buses();
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (const Branch& br : net.branches()) {
        const Eigen::Matrix2cd y =
            br.b * gamma_at(br.tau, net.omega0(), {0.0, omega});
        Y.block<2, 2>(2 * br.from, 2 * br.from) += y;
        if (br.to != net.ground_bus()) {
            Y.block<2, 2>(2 * br.to, 2 * br.to) += y;
            Y.block<2, 2>(2 * br.from, 2 * br.to) -= y;
            Y.block<2, 2>(2 * br.to, 2 * br.from) -= y;
        }
    }
    return Y;
}

Eigen::MatrixXcd kron_reduce(const Eigen::MatrixXcd& Y_full,
                             const std::vector<int>& interior) {
    const int n_total = static_cast<int>(Y_full.rows()) / 2;
    std::vector<int> keep;
    for (int b = 0; b < n_total; ++b)
        if (std::find(interior.begin(), interior.end(), b) == interior.end())
            keep.push_back(b);
    return schur_reduce(Y_full, keep, interior);
}

Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B_full,
                            const std::vector<int>& interior) {
    const int n_total = static_cast<int>(B_full.rows());
    std::vector<int> keep;
    for (int b = 0; b < n_total; ++b)
        if (std::find(interior.begin(), interior.end(), b) == interior.end())
            keep.push_back(b);
    // scalar variant: reuse the 2x2-block machinery on a blown-up matrix
    // would be wasteful; do it directly.
    std::vector<int> drop = interior;
    Eigen::MatrixXd Y1(keep.size(), keep.size()), Y2(keep.size(), drop.size());
    Eigen::MatrixXd Y3(drop.size(), keep.size()), Y4(drop.size(), drop.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j)
            Y1(i, j) = B_full(keep[i], keep[j]);
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < drop.size(); ++j)
            Y2(i, j) = B_full(keep[i], drop[j]);
    for (std::size_t i = 0; i < drop.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j)
            Y3(i, j) = B_full(drop[i], keep[j]);
    for (std::size_t i = 0; i < drop.size(); ++i)
        for (std::size_t j = 0; j < drop.size(); ++j)
            Y4(i, j) = B_full(drop[i], drop[j]);
    if (drop.empty())
        return Y1;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Y4);
    if (!(lu.rcond() > 1e-12))
        throw SingularInteriorBlock("interior block is numerically singular");
    return Y1 - Y2 * lu.solve(Y3);
}

ScaledGridOperator::ScaledGridOperator(const NetworkModel& net)
    : net_(net), tau0_(net.mean_tau()) {
    if (net_.uniform_tau()) {
        Eigen::MatrixXd B_red = kron_reduce(static_b_matrix(net_), net_.interior_buses());
        Eigen::VectorXd s_inv_sqrt(net_.n_devices());
        for (int i = 0; i < net_.n_devices(); ++i)
            s_inv_sqrt(i) = 1.0 / std::sqrt(net_.capacities()[static_cast<std::size_t>(i)]);
        static_b_ = s_inv_sqrt.asDiagonal() * B_red * s_inv_sqrt.asDiagonal();
    }
}

const Eigen::MatrixXd& ScaledGridOperator::static_b() const {
    if (!static_b_)
        throw DimensionMismatch("static B fast path requires a uniform branch tau");
    return *static_b_;
}

Eigen::MatrixXcd ScaledGridOperator::eval(double omega) const {
    const int n = net_.n_devices();
    if (static_b_) {
        const Eigen::Matrix2cd g = gamma_at(net_.branches().front().tau,
                                            net_.omega0(), {0.0, omega});
        Eigen::MatrixXcd out(2 * n, 2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.block<2, 2>(2 * i, 2 * j) = (*static_b_)(i, j) * g;
        return out;
    }
    Eigen::MatrixXcd reduced =
        kron_reduce(assemble_dynamic_y(net_, omega), net_.interior_buses());
    Eigen::VectorXcd s_inv_sqrt(2 * n);
    for (int i = 0; i < n; ++i) {
        const double v = 1.0 / std::sqrt(net_.capacities()[static_cast<std::size_t>(i)]);
        s_inv_sqrt(2 * i) = v;
        s_inv_sqrt(2 * i + 1) = v;
    }
    return s_inv_sqrt.asDiagonal() * reduced * s_inv_sqrt.asDiagonal();
}

Eigen::MatrixXcd closed_loop_admittance(const std::vector<StateSpaceModel>& devices,
                                        const ScaledGridOperator& netop, double omega) {
    const int n = netop.network().n_devices();
    if (static_cast<int>(devices.size()) != n)
        throw DimensionMismatch("one device model per device bus required");
    Eigen::MatrixXcd Y = netop.eval(omega);
    for (int i = 0; i < n; ++i)
        Y.block<2, 2>(2 * i, 2 * i) +=
            eval_at(devices[static_cast<std::size_t>(i)], {0.0, omega});
    return Y;
}

Eigen::MatrixXcd closed_loop_impedance(const std::vector<StateSpaceModel>& devices,
                                       const ScaledGridOperator& netop, double omega) {
    const Eigen::MatrixXcd Y = closed_loop_admittance(devices, netop, omega);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Y);
    if (!(lu.rcond() > 1e-12))
        throw SingularClosedLoop("closed loop resonant at omega = " +
                                 std::to_string(omega));
    return lu.inverse();
}

Eigen::MatrixXcd power_coordinate_sensitivity(const Eigen::MatrixXcd& Z_cl,
                                              const std::vector<Eigen::Vector2d>& U_dq0) {
    if (Z_cl.rows() != static_cast<Eigen::Index>(2 * U_dq0.size()))
        throw DimensionMismatch("one operating voltage per device bus required");
    Eigen::MatrixXcd out = Z_cl;
    for (std::size_t i = 0; i < U_dq0.size(); ++i) {
        Eigen::Matrix2d u0;
        u0 << U_dq0[i].x(), U_dq0[i].y(), U_dq0[i].y(), -U_dq0[i].x();
        out.middleRows<2>(static_cast<Eigen::Index>(2 * i)) =
            u0.cast<std::complex<double>>() *
            Z_cl.middleRows<2>(static_cast<Eigen::Index>(2 * i));
    }
    return out;
}

Eigen::MatrixXcd ClosedLoopSs::transfer_at(std::complex<double> s) const {
    return eval_at(ss, s) + s * deriv_gain.cast<std::complex<double>>();
}

ClosedLoopSs assemble_closed_loop_ss(const std::vector<StateSpaceModel>& devices,
                                     const NetworkModel& net) {
    const int n = net.n_devices();
    const int nbus = net.n_buses();
    const int nb = static_cast<int>(net.branches().size());
    const double w0 = net.omega0();
    if (static_cast<int>(devices.size()) != n)
        throw DimensionMismatch("one device model per device bus required");
    for (const auto& dev : devices)
        if (!dev.strictly_proper() || dev.n_u() != 2 || dev.n_y() != 2)
            throw IllPosedLoop(
                "closed-loop assembly needs strictly proper 2x2 device models");

    // Raw states z = [branch currents nu_b (2 each); device states x_k]:
    //   z' = F z + G U,       U = all bus voltages (2 nbus)
    //   Cons z = P i_D        KCL at every bus (system-base currents)
    Eigen::Index n_dev_states = 0;
    std::vector<Eigen::Index> dev_off(devices.size());
    for (std::size_t k = 0; k < devices.size(); ++k) {
        dev_off[k] = 2 * nb + n_dev_states;
        n_dev_states += devices[k].n_x();
    }
    const Eigen::Index nz = 2 * nb + n_dev_states;
    const Eigen::Index nU = 2 * nbus;

    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nz, nz);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nz, nU);
    Eigen::MatrixXd Cons = Eigen::MatrixXd::Zero(nU, nz);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nU, 2 * n);

    const Eigen::Matrix2d J = rot90();
    for (int b = 0; b < nb; ++b) {
        const Branch& br = net.branches()[static_cast<std::size_t>(b)];
        const Eigen::Matrix2d K = br.tau * Eigen::Matrix2d::Identity() + J;
        F.block<2, 2>(2 * b, 2 * b) = -w0 * K;
        G.block<2, 2>(2 * b, 2 * br.from) = w0 * br.b * Eigen::Matrix2d::Identity();
        if (br.to != net.ground_bus())
            G.block<2, 2>(2 * b, 2 * br.to) = -w0 * br.b * Eigen::Matrix2d::Identity();
        // current nu_b flows from -> to: leaves `from`, enters `to`
        Cons.block<2, 2>(2 * br.from, 2 * b) = Eigen::Matrix2d::Identity();
        if (br.to != net.ground_bus())
            Cons.block<2, 2>(2 * br.to, 2 * b) = -Eigen::Matrix2d::Identity();
    }
    for (int k = 0; k < n; ++k) {
        const StateSpaceModel& dev = devices[static_cast<std::size_t>(k)];
        const double S_k = net.capacities()[static_cast<std::size_t>(k)];
        const Eigen::Index off = dev_off[static_cast<std::size_t>(k)];
        const Eigen::Index nx = dev.n_x();
        F.block(off, off, nx, nx) = dev.A();
        G.block(off, 2 * k, nx, 2) = dev.B();
        // device current into the converter, system base = S_k C x
        Cons.block(2 * k, off, 2, nx) = S_k * dev.C();
        P.block<2, 2>(2 * k, 2 * k) = Eigen::Matrix2d::Identity();
    }

    // Node voltages from the differentiated KCL: M U = P i_D' - Cons F z.
    Eigen::MatrixXd M = Cons * G;
    Eigen::PartialPivLU<Eigen::MatrixXd> mlu(M);
    if (!(mlu.rcond() > 1e-12))
        throw IllPosedLoop("node elimination matrix is singular");

    // Reduced coordinates on the constraint manifold: z = Psi i_D + N w.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Cons,
                                          Eigen::ComputeFullV | Eigen::ComputeThinU);
    const double rank_tol = 1e-10 * svd.singularValues()(0);
    if (svd.singularValues().minCoeff() <= rank_tol)
        throw IllPosedLoop("bus current constraints are rank deficient");
    const Eigen::Index nw = nz - nU;
    if (nw < 0)
        throw IllPosedLoop("network has fewer states than constraints");
    const Eigen::MatrixXd N = svd.matrixV().rightCols(nw);
    const Eigen::MatrixXd Psi = svd.solve(P); // minimum-norm particular solution

    const Eigen::MatrixXd H = F - G * mlu.solve(Cons * F);
    const Eigen::MatrixXd U_of_z = -mlu.solve(Cons * F); // U = U_of_z z (+ E i_D')

    // Capacity scaling to the normalized coordinates of the closed loop.
    Eigen::VectorXd s_sqrt(2 * n);
    for (int i = 0; i < n; ++i) {
        const double v = std::sqrt(net.capacities()[static_cast<std::size_t>(i)]);
        s_sqrt(2 * i) = v;
        s_sqrt(2 * i + 1) = v;
    }
    const Eigen::MatrixXd sel_dev =
        Eigen::MatrixXd::Identity(2 * n, nU); // device buses come first

    Eigen::MatrixXd A = N.transpose() * H * N;
    Eigen::MatrixXd B = N.transpose() * H * Psi * s_sqrt.asDiagonal();
    Eigen::MatrixXd C = s_sqrt.asDiagonal() * sel_dev * U_of_z * N;
    Eigen::MatrixXd D =
        s_sqrt.asDiagonal() * sel_dev * U_of_z * Psi * s_sqrt.asDiagonal();
    Eigen::MatrixXd E = s_sqrt.asDiagonal() * sel_dev * mlu.solve(P) *
                        s_sqrt.asDiagonal();

    return {StateSpaceModel(A, B, C, D), E};
}

} // namespace gridformer
