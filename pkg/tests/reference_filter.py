"""Independent straight-line reference of the two-stage command filter.

Written directly from the filter definition, before and separately from the
package implementation; the acceptance suite compares process_command
against this on 10^4 random inputs.  Keep it dumb: no shared code with
telefilter.
"""

import math


def reference_filter(translation, rotation, command_hz, control_hz,
                     max_pos_step, max_rot_step, pos_deadband, rot_deadband):
    """Returns (substeps, period): substeps is a list of ([tx,ty,tz], [rx,ry,rz])."""
    t_norm = math.sqrt(sum(c * c for c in translation))
    if t_norm > pos_deadband:
        t_f = [c / t_norm * max_pos_step for c in translation]
    else:
        t_f = [0.0, 0.0, 0.0]
    r_norm = math.sqrt(sum(c * c for c in rotation))
    if r_norm > rot_deadband:
        r_f = [c / r_norm * max_rot_step for c in rotation]
    else:
        r_f = [0.0, 0.0, 0.0]
    k = round(control_hz / command_hz)
    step = ([c / k for c in t_f], [c / k for c in r_f])
    return [step] * k, 1.0 / control_hz
