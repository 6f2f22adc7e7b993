// Small deterministic force layout for the pulled edge list. Users and
// items start on two concentric circles, then a few spring/repulsion
// sweeps relax the picture. Everything is a pure function of the edge
// list so tests can assert on exact output.

export interface LayoutNode {
  id: string;
  modality: "user" | "item";
  index: number;
  degree: number;
  x: number;
  y: number;
  radius: number;
  color: string;
}

export interface LayoutEdge {
  from: string;
  to: string;
}

export interface GraphLayout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  disabled: false;
}

export interface DisabledLayout {
  disabled: true;
  reason: string;
}

export const LAYOUT_NODE_LIMIT = 1500;
export const USER_NODE_COLOR = "#3b82f6";
export const ITEM_NODE_COLOR = "#ef4444";

const SPRING_LENGTH = 0.18;
const SPRING_STRENGTH = 0.04;
const REPULSION = 0.0015;
const SWEEPS = 40;

export function layoutGraph(
  edges: [number, number][],
  viewLimit: number,
): GraphLayout | DisabledLayout {
  if (edges.length > viewLimit) {
    return {
      disabled: true,
      reason: `edge view limited to ${viewLimit} edges; graph has ${edges.length}`,
    };
  }

  const userDegree = new Map<number, number>();
  const itemDegree = new Map<number, number>();
  for (const [u, i] of edges) {
    userDegree.set(u, (userDegree.get(u) ?? 0) + 1);
    itemDegree.set(i, (itemDegree.get(i) ?? 0) + 1);
  }
  const users = [...userDegree.keys()].sort((a, b) => a - b);
  const items = [...itemDegree.keys()].sort((a, b) => a - b);

  const nodes: LayoutNode[] = [];
  const slot = new Map<string, number>();
  const place = (
    indices: number[],
    modality: "user" | "item",
    ring: number,
    degrees: Map<number, number>,
  ) => {
    indices.forEach((index, i) => {
      const angle = (2 * Math.PI * i) / Math.max(indices.length, 1);
      const degree = degrees.get(index) ?? 0;
      const id = `${modality[0]}${index}`;
      slot.set(id, nodes.length);
      nodes.push({
        id,
        modality,
        index,
        degree,
        x: 0.5 + ring * Math.cos(angle),
        y: 0.5 + ring * Math.sin(angle),
        radius: nodeRadius(degree),
        color: modality === "user" ? USER_NODE_COLOR : ITEM_NODE_COLOR,
      });
    });
  };
  place(users, "user", 0.28, userDegree);
  place(items, "item", 0.42, itemDegree);

  const layoutEdges: LayoutEdge[] = edges.map(([u, i]) => ({
    from: `u${u}`,
    to: `i${i}`,
  }));

  if (nodes.length > 1 && nodes.length <= LAYOUT_NODE_LIMIT) {
    relax(nodes, layoutEdges, slot);
  }
  return { nodes, edges: layoutEdges, disabled: false };
}

export function nodeRadius(degree: number): number {
  return 2 + 1.6 * Math.sqrt(degree);
}

function relax(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  slot: Map<string, number>,
): void {
  const fx = new Float64Array(nodes.length);
  const fy = new Float64Array(nodes.length);
  for (let sweep = 0; sweep < SWEEPS; sweep++) {
    fx.fill(0);
    fy.fill(0);
    for (let a = 0; a < nodes.length; a++) {
      for (let b = a + 1; b < nodes.length; b++) {
        let dx = nodes[a].x - nodes[b].x;
        let dy = nodes[a].y - nodes[b].y;
        const d2 = dx * dx + dy * dy || 1e-6;
        const f = REPULSION / d2;
        dx *= f;
        dy *= f;
        fx[a] += dx;
        fy[a] += dy;
        fx[b] -= dx;
        fy[b] -= dy;
      }
    }
    for (const edge of edges) {
      const a = slot.get(edge.from)!;
      const b = slot.get(edge.to)!;
      const dx = nodes[b].x - nodes[a].x;
      const dy = nodes[b].y - nodes[a].y;
      const dist = Math.sqrt(dx * dx + dy * dy) || 1e-6;
      const f = (SPRING_STRENGTH * (dist - SPRING_LENGTH)) / dist;
      fx[a] += dx * f;
      fy[a] += dy * f;
      fx[b] -= dx * f;
      fy[b] -= dy * f;
    }
    for (let n = 0; n < nodes.length; n++) {
      nodes[n].x = clamp01(nodes[n].x + clampStep(fx[n]));
      nodes[n].y = clamp01(nodes[n].y + clampStep(fy[n]));
    }
  }
}

function clampStep(v: number): number {
  return Math.max(-0.05, Math.min(0.05, v));
}

function clamp01(v: number): number {
  return Math.max(0.02, Math.min(0.98, v));
}

export function drawLayout(
  ctx: CanvasRenderingContext2D,
  layout: GraphLayout,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "rgba(100, 116, 139, 0.35)";
  ctx.lineWidth = 0.6;
  const at = new Map(layout.nodes.map((n) => [n.id, n]));
  for (const edge of layout.edges) {
    const a = at.get(edge.from)!;
    const b = at.get(edge.to)!;
    ctx.beginPath();
    ctx.moveTo(a.x * width, a.y * height);
    ctx.lineTo(b.x * width, b.y * height);
    ctx.stroke();
  }
  for (const node of layout.nodes) {
    ctx.fillStyle = node.color;
    ctx.beginPath();
    ctx.arc(node.x * width, node.y * height, node.radius, 0, Math.PI * 2);
    ctx.fill();
  }
}
