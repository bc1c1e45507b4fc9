// Centripetal Catmull-Rom sampling for the live ink trace.  The curve
// passes through every captured touch point, so the rendered feedback
// follows the finger exactly; normalization happens server-side only.

export interface Vec2 {
  x: number;
  y: number;
}

const ALPHA = 0.5;

function knot(prev: number, a: Vec2, b: Vec2): number {
  return prev + Math.hypot(b.x - a.x, b.y - a.y) ** ALPHA;
}

function lerp(a: Vec2, b: Vec2, w0: number, w1: number): Vec2 {
  return { x: w0 * a.x + w1 * b.x, y: w0 * a.y + w1 * b.y };
}

/** Interior samples of the arc p1->p2 (endpoints excluded). */
function segment(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2, count: number): Vec2[] {
  const t0 = 0;
  const t1 = knot(t0, p0, p1);
  const t2 = knot(t1, p1, p2);
  const t3 = knot(t2, p2, p3);
  if (t1 === t0 || t2 === t1 || t3 === t2) {
    // coincident control points: fall back to the chord
    const out: Vec2[] = [];
    for (let i = 1; i <= count; i++) {
      const u = i / (count + 1);
      out.push(lerp(p1, p2, 1 - u, u));
    }
    return out;
  }
  const out: Vec2[] = [];
  for (let i = 1; i <= count; i++) {
    const t = t1 + ((t2 - t1) * i) / (count + 1);
    const a1 = lerp(p0, p1, (t1 - t) / (t1 - t0), (t - t0) / (t1 - t0));
    const a2 = lerp(p1, p2, (t2 - t) / (t2 - t1), (t - t1) / (t2 - t1));
    const a3 = lerp(p2, p3, (t3 - t) / (t3 - t2), (t - t2) / (t3 - t2));
    const b1 = lerp(a1, a2, (t2 - t) / (t2 - t0), (t - t0) / (t2 - t0));
    const b2 = lerp(a2, a3, (t3 - t) / (t3 - t1), (t - t1) / (t3 - t1));
    out.push(lerp(b1, b2, (t2 - t) / (t2 - t1), (t - t1) / (t2 - t1)));
  }
  return out;
}

/**
 * Dense polyline through `points` (consecutive duplicates collapsed),
 * with `perSegment` interior samples between each touch-point pair.
 */
export function samplePath(points: Vec2[], perSegment = 8): Vec2[] {
  const pts = points.filter(
    (p, i) => i === 0 || p.x !== points[i - 1].x || p.y !== points[i - 1].y,
  );
  if (pts.length < 2) return pts.slice();
  const first = pts[0];
  const last = pts[pts.length - 1];
  const ctrl = [
    { x: 2 * first.x - pts[1].x, y: 2 * first.y - pts[1].y },
    ...pts,
    { x: 2 * last.x - pts[pts.length - 2].x, y: 2 * last.y - pts[pts.length - 2].y },
  ];
  const out: Vec2[] = [];
  for (let i = 0; i < pts.length - 1; i++) {
    out.push(pts[i]);
    out.push(...segment(ctrl[i], ctrl[i + 1], ctrl[i + 2], ctrl[i + 3], perSegment));
  }
  out.push(last);
  return out;
}
