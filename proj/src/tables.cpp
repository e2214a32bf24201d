#include "tizx/tables.hpp"

#include "tizx/errors.hpp"

namespace tizx {

CoefficientSet published_table_mrx2()
{
    Eigen::MatrixXd g(8, 4);
    g << 0.2719, 0.3751, 0.3715, 0.2378,
         0.2081, 0.2129, 0.1,    0.1,
         0.1719, 0.1,    0.1,    0.1440,
         0.1,    0.1,    0.1832, 0.1572,
         0.1,    0.1,    0.1,    0.1,
         0.1,    0.2030, 0.1,    0.1,
         0.1,    0.2507, 0.2551, 0.1655,
         0.1,    0.1,    0.1,    0.1647;
    return CoefficientSet(ZxParams::for_oversampling(2), std::move(g));
}

CoefficientSet published_table_mrx3()
{
    Eigen::MatrixXd g(4, 3);
    g << 0.4566, 0.4809, 0.4006,
         0.2631, 0.1,    0.1014,
         0.1334, 0.1,    0.2312,
         0.1,    0.2875, 0.3692;
    return CoefficientSet(ZxParams::for_oversampling(3), std::move(g));
}

CoefficientSet published_table(int m_rx)
{
    switch (m_rx) {
    case 2: return published_table_mrx2();
    case 3: return published_table_mrx3();
    default: throw ConfigError("no published coefficient table for m_rx=" + std::to_string(m_rx));
    }
}

}  // namespace tizx
