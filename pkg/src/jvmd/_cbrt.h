#ifndef JVMD_CBRT_H
#define JVMD_CBRT_H

/* Principal complex cube root of zr + i zi, written to wr + i wi.
   zr and zi are clobbered (used as scratch). */
void jvmd_principal_cbrt(double *zr, double *zi, double *wr, double *wi, long n);

#endif
