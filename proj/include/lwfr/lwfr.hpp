#ifndef LWFR_LWFR_HPP
#define LWFR_LWFR_HPP

#include "lwfr/basis.hpp"
#include "lwfr/cases.hpp"
#include "lwfr/config.hpp"
#include "lwfr/equations.hpp"
#include "lwfr/exact_riemann.hpp"
#include "lwfr/flux_correction.hpp"
#include "lwfr/limiters.hpp"
#include "lwfr/lwfr_core.hpp"
#include "lwfr/mesh.hpp"
#include "lwfr/options.hpp"
#include "lwfr/output.hpp"
#include "lwfr/solver1d.hpp"
#include "lwfr/solver2d.hpp"
#include "lwfr/subcell.hpp"
#include "lwfr/types.hpp"

#endif
