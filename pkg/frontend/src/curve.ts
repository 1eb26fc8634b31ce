// Accuracy-vs-labels chart: pure coordinate math plus a thin canvas layer.

export interface Point {
  x: number;
  y: number;
}

// Map curve points into pixel space: labeled counts span the x axis,
// accuracy is fixed to [0, 1] so the scale never jumps between polls.
export function toPolyline(
  curve: [number, number][],
  width: number,
  height: number,
  pad = 8,
): Point[] {
  if (curve.length === 0) return [];
  const xs = curve.map(([c]) => c);
  const lo = Math.min(...xs);
  const hi = Math.max(...xs);
  const span = hi > lo ? hi - lo : 1;
  return curve.map(([count, acc]) => ({
    x: pad + ((count - lo) / span) * (width - 2 * pad),
    y: height - pad - acc * (height - 2 * pad),
  }));
}

export function drawCurve(canvas: HTMLCanvasElement, curve: [number, number][]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (curve.length === 0) {
    ctx.fillStyle = "#888";
    ctx.font = "12px sans-serif";
    ctx.fillText("no curve yet", 10, canvas.height / 2);
    return;
  }
  const pts = toPolyline(curve, canvas.width, canvas.height);
  ctx.strokeStyle = "#2b6cb0";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  pts.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
  ctx.stroke();
  ctx.fillStyle = "#2b6cb0";
  for (const p of pts) {
    ctx.fillRect(p.x - 1.5, p.y - 1.5, 3, 3);
  }
  const last = pts[pts.length - 1];
  ctx.fillStyle = "#e53e3e";
  ctx.beginPath();
  ctx.arc(last.x, last.y, 4, 0, 2 * Math.PI);
  ctx.fill();
}
