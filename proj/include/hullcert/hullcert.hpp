#ifndef HULLCERT_HULLCERT_HPP_
#define HULLCERT_HULLCERT_HPP_

#include "hullcert/bounds.hpp"
#include "hullcert/config.hpp"
#include "hullcert/core.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/experiments.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/maps.hpp"
#include "hullcert/ocp_params.hpp"
#include "hullcert/qp.hpp"
#include "hullcert/reachability.hpp"
#include "hullcert/robustopt.hpp"
#include "hullcert/svg.hpp"

#endif  // HULLCERT_HULLCERT_HPP_
