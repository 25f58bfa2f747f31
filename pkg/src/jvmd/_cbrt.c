/* Vectorizable principal complex cube root.
 *
 * Defining __FAST_MATH__ before <math.h> only exposes glibc's libmvec SIMD
 * declarations; the file is compiled without -ffast-math (linking that into a
 * shared object sets flush-to-zero for the whole process). sin and cos are
 * kept in separate loops: gcc fuses them into sincos, which has no vector
 * variant.
 */
#if defined(__GLIBC__) || defined(__linux__)
#ifndef __FAST_MATH__
#define __FAST_MATH__ 1
#endif
#endif
#include <math.h>

#include "_cbrt.h"

void jvmd_principal_cbrt(double *restrict zr, double *restrict zi,
                         double *restrict wr, double *restrict wi, long n)
{
    long i;
    /* arg in (-pi, pi]: only a strictly negative imaginary part maps below */
    for (i = 0; i < n; i++) {
        double t = atan2(fabs(zi[i]), zr[i]);
        wi[i] = ((zi[i] < 0.0) ? -t : t) * (1.0 / 3.0);
        wr[i] = cbrt(hypot(zr[i], zi[i]));
    }
    for (i = 0; i < n; i++)
        zr[i] = wr[i] * sin(wi[i]);
    for (i = 0; i < n; i++)
        wr[i] = wr[i] * cos(wi[i]);
    for (i = 0; i < n; i++)
        wi[i] = zr[i];
}
