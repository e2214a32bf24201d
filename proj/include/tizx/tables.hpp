#pragma once

#include "tizx/zxmap.hpp"

namespace tizx {

// Published optimal coefficient sets at ||G||_F^2 = 1, f_c = 0.65/T.
CoefficientSet published_table_mrx2();  // 8 x 4
CoefficientSet published_table_mrx3();  // 4 x 3

/// Published set for the given oversampling factor.
CoefficientSet published_table(int m_rx);

}  // namespace tizx
