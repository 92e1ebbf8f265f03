/** Wire types, mirroring the link-tree interchange format and suggest API. */

export interface WireDescriptor {
  label: string;
  p: number;
}

export interface WireNode {
  code: string;
  name: string;
  level: number;
  low_support: boolean;
  descriptors: WireDescriptor[];
  children: WireNode[];
}

export interface SuggestResponse {
  descriptors: WireDescriptor[];
}

/** One node of the explorer's view model. */
export interface UiNode {
  code: string;
  name: string;
  level: number;
  lowSupport: boolean;
  /** Exactly the service-delivered (label, p) pairs, never re-ranked. */
  descriptors: WireDescriptor[];
  children: UiNode[];
  parent: UiNode | null;
  hasChildren: boolean;
  expanded: boolean;
  /** Layout slot; filled by layoutTree over visible nodes. */
  x: number;
  y: number;
}
